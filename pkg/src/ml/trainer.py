"""
Mini-batch training loop and prediction for the BN-embedded dense classifier.
"""

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from src.config import TrainConfig
from src.data.processor import Standardizer, apply_standardizer
from src.errors import BatchTooSmall, DimensionMismatch, LabelOutOfRange, TrainingDiverged, Unfitted
from src.seeding import derive_seed

from .layers import softmax, softmax_cross_entropy
from .network import Network, NetworkSpec, xavier_init
from .optimizer import AdamState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpochLog:
    """
    Summary of one completed epoch.

    Attributes:
        epoch: 1-based epoch number
        mean_loss: Row-weighted mean of the mini-batch losses seen during the epoch
        train_accuracy: Inference-mode accuracy on the full training set after the epoch
    """

    epoch: int
    mean_loss: float
    train_accuracy: float

    def to_dict(self) -> dict[str, Any]:
        return {"epoch": self.epoch, "mean_loss": self.mean_loss, "train_accuracy": self.train_accuracy}


@dataclass
class TrainedModel:
    """
    Network plus everything needed to use and reproduce it.

    Attributes:
        spec: Layer layout
        network: Layers with learned parameters and BN running statistics
        standardizer: Input standardizer applied by ``predict`` (None when inputs are pre-standardized)
        training_log: One entry per completed epoch
        seed: Training seed
        optimizer_steps: Number of Adam steps taken
        train_seconds: Wall-clock training time (not persisted)
    """

    spec: NetworkSpec
    network: Network
    standardizer: Standardizer | None = None
    training_log: list[EpochLog] = field(default_factory=list)
    seed: int = 0
    optimizer_steps: int = 0
    train_seconds: float = 0.0

    def with_standardizer(self, standardizer: Standardizer) -> "TrainedModel":
        return replace(self, standardizer=standardizer)


def batch_slices(n: int, batch_size: int) -> list[slice]:
    """
    Contiguous mini-batch slices over ``n`` shuffled rows.

    The last partial batch is kept; when it has fewer than 2 rows it is merged
    into the previous batch so training-mode BN always sees at least 2 rows.
    """
    bounds = list(range(0, n, batch_size)) + [n]
    slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    if len(slices) > 1 and slices[-1].stop - slices[-1].start < 2:
        tail = slices.pop()
        slices[-1] = slice(slices[-1].start, tail.stop)
    return slices


def train(
    spec: NetworkSpec,
    features: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig | None = None,
) -> TrainedModel:
    """
    Train a network with seeded mini-batch Adam.

    Every epoch reshuffles the rows, then runs forward (BN in training mode),
    softmax cross-entropy, backward and one Adam step per mini-batch. After
    each epoch the mean loss and the inference-mode training accuracy are
    logged. Training stops early when the mean loss has not improved for
    ``config.patience`` epochs.

    Args:
        spec: Network layout; its input_dim must match the feature width
        features: (n, d) standardized features
        labels: (n,) class indices
        config: Hyperparameters (batch 128, 100 epochs, lr 1e-3 by default)

    Returns:
        TrainedModel: Network switched to inference statistics and the epoch log.
            With ``epochs == 0`` the network is the untouched initialization.

    Raises:
        BatchTooSmall: Fewer than 2 rows.
        DimensionMismatch: Feature width differs from ``spec.input_dim``.
        LabelOutOfRange: Label outside [0, num_classes).
        TrainingDiverged: Loss became NaN or infinite.
    """
    config = config or TrainConfig()
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[1] != spec.input_dim:
        raise DimensionMismatch(f"Spec expects {spec.input_dim} features, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise DimensionMismatch(f"{y.size} labels for {x.shape[0]} rows")
    if x.shape[0] < 2:
        raise BatchTooSmall(f"Training needs at least 2 rows, got {x.shape[0]}")
    if y.min() < 0 or y.max() >= spec.num_classes:
        raise LabelOutOfRange(f"Labels must lie in [0, {spec.num_classes}), got range [{y.min()}, {y.max()}]")

    network = Network(spec, xavier_init(spec, derive_seed(config.seed, "init")))
    shuffle_rng = np.random.default_rng(derive_seed(config.seed, "shuffle"))
    adam = AdamState(lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.adam_eps)
    params = network.parameters()
    slices = batch_slices(x.shape[0], config.batch_size)

    log: list[EpochLog] = []
    best_loss, stale_epochs = np.inf, 0
    started = time.perf_counter()
    logger.info("Training %s on %d rows: %s", spec.name, x.shape[0], network.summary())

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(x.shape[0])
        total_loss = 0.0
        for part in slices:
            idx = order[part]
            logits, cache = network.forward_train(x[idx])
            loss, dlogits = softmax_cross_entropy(logits, y[idx], spec.num_classes)
            if not np.isfinite(loss):
                raise TrainingDiverged(f"Non-finite loss {loss} at epoch {epoch}")
            grads = network.backward(cache, dlogits)
            adam.step(params, grads)
            network.mark_updated()
            total_loss += loss * idx.size
            logger.debug("epoch %d batch %d-%d loss %.6f", epoch, part.start, part.stop, loss)

        mean_loss = total_loss / x.shape[0]
        accuracy = float(np.mean(_argmax(network.forward_infer(x)) == y))
        log.append(EpochLog(epoch, mean_loss, accuracy))
        logger.info("Epoch %d/%d: loss %.5f, train accuracy %.4f", epoch, config.epochs, mean_loss, accuracy)

        if mean_loss < best_loss:
            best_loss, stale_epochs = mean_loss, 0
        else:
            stale_epochs += 1
            if config.patience is not None and stale_epochs >= config.patience:
                logger.warning("Early stop at epoch %d: no loss improvement for %d epochs", epoch, stale_epochs)
                break

    return TrainedModel(
        spec=spec,
        network=network,
        training_log=log,
        seed=config.seed,
        optimizer_steps=adam.t,
        train_seconds=time.perf_counter() - started,
    )


def _argmax(logits: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. ties go to the lowest class index
    return np.argmax(logits, axis=1)


def predict_logits(model: TrainedModel, features) -> np.ndarray:
    """Inference-mode logits, standardizing first when the model carries a standardizer."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if model.standardizer is not None:
        x = apply_standardizer(model.standardizer, x)
    if not model.network.fitted:
        raise Unfitted("Model has BatchNorm layers without running statistics; train it first")
    return model.network.forward_infer(x)


def predict_proba(model: TrainedModel, features) -> np.ndarray:
    """Inference-mode class probabilities, one row per sample summing to 1."""
    return softmax(predict_logits(model, features))


def predict(model: TrainedModel, features) -> np.ndarray:
    """
    Predicted class indices (argmax of the softmax output; ties go to the lowest index).

    Raises:
        Unfitted: If BN layers never saw a training step.
        DimensionMismatch: If the feature width is wrong.
    """
    return _argmax(predict_logits(model, features))
