"""
Dense, batch-normalization and sigmoid layers with manual forward/backward passes.

Every layer exposes ``forward(x, training) -> (y, cache)`` and
``backward(dy, cache) -> (dx, grads)``; caches are plain objects returned to the
caller, so a layer holds no per-batch state besides BN running statistics.
"""

import logging
from typing import Any, NamedTuple

import numpy as np
from scipy.special import expit, logsumexp
from scipy.special import softmax as _softmax

from src.errors import BatchTooSmall, DimensionMismatch, LabelOutOfRange, Unfitted

logger = logging.getLogger(__name__)


class Dense:
    """Fully connected layer y = x @ W + b."""

    kind = "dense"

    def __init__(self, weights: np.ndarray, bias: np.ndarray):
        self.W = np.asarray(weights, dtype=np.float64)
        self.b = np.asarray(bias, dtype=np.float64)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[1],):
            raise DimensionMismatch(f"Dense weights {self.W.shape} and bias {self.b.shape} do not chain")

    @property
    def in_width(self) -> int:
        return int(self.W.shape[0])

    @property
    def out_width(self) -> int:
        return int(self.W.shape[1])

    def params(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "b": self.b}

    def forward(self, x: np.ndarray, training: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """
        Apply the affine map.

        Args:
            x: (batch, in_width) inputs
            training: Unused; Dense behaves the same in both modes

        Returns:
            tuple: (batch, out_width) outputs and the input kept for ``backward``

        Raises:
            DimensionMismatch: If ``x`` is not 2-D with ``in_width`` columns.
        """
        if x.ndim != 2 or x.shape[1] != self.in_width:
            raise DimensionMismatch(f"Dense layer expects width {self.in_width}, got shape {x.shape}")
        return x @ self.W + self.b, x

    def backward(self, dy: np.ndarray, cache: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        """
        Propagate ``dy`` back through the affine map.

        Args:
            dy: Gradient of the loss with respect to the outputs
            cache: Input saved by ``forward``

        Returns:
            tuple: Gradient with respect to the input and ``{"W": x.T @ dy, "b": sum of dy}``
        """
        x = cache
        grads = {"W": x.T @ dy, "b": dy.sum(axis=0)}
        return dy @ self.W.T, grads


class BatchCache(NamedTuple):
    """Batch statistics kept from a training-mode BN forward pass."""

    x_hat: np.ndarray
    inv_std: np.ndarray
    batch_mean: np.ndarray
    batch_var: np.ndarray


class BatchNorm:
    """
    Batch normalization over the feature axis.

    Training mode normalizes by the batch mean and population variance and
    updates the running statistics as
    ``running = momentum * running + (1 - momentum) * batch``.
    Inference mode uses the frozen running statistics.

    Args:
        width: Number of features
        momentum: Weight of the previous running statistic (default 0.9)
        eps: Variance floor inside the square root (default 1e-5)
    """

    kind = "batchnorm"

    def __init__(self, width: int, momentum: float = 0.9, eps: float = 1e-5):
        self.gamma = np.ones(width)
        self.beta = np.zeros(width)
        self.running_mean = np.zeros(width)
        self.running_var = np.ones(width)
        self.momentum = momentum
        self.eps = eps
        self.steps_seen = 0

    @property
    def width(self) -> int:
        return int(self.gamma.size)

    @property
    def fitted(self) -> bool:
        return self.steps_seen > 0

    def params(self) -> dict[str, np.ndarray]:
        return {"gamma": self.gamma, "beta": self.beta}

    def _check_width(self, x: np.ndarray) -> None:
        if x.ndim != 2 or x.shape[1] != self.width:
            raise DimensionMismatch(f"BatchNorm expects width {self.width}, got shape {x.shape}")

    def forward(self, x: np.ndarray, training: bool = False) -> tuple[np.ndarray, BatchCache | None]:
        """Dispatch to ``forward_train`` or ``forward_infer``; the cache is None in inference mode."""
        if training:
            return self.forward_train(x)
        return self.forward_infer(x), None

    def forward_train(self, x: np.ndarray) -> tuple[np.ndarray, BatchCache]:
        """
        Normalize by the batch statistics and fold them into the running ones.

        Args:
            x: (batch, width) inputs, batch of at least 2 rows

        Returns:
            tuple: Normalized, scaled and shifted outputs plus the BatchCache for ``backward``

        Raises:
            DimensionMismatch: If the width differs from the layer's.
            BatchTooSmall: For a single-row batch.
        """
        self._check_width(x)
        if x.shape[0] < 2:
            raise BatchTooSmall(f"Training-mode batch normalization needs at least 2 rows, got {x.shape[0]}")

        mean = x.mean(axis=0)
        var = x.var(axis=0)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        x_hat = (x - mean) * inv_std

        self.running_mean = self.momentum * self.running_mean + (1.0 - self.momentum) * mean
        self.running_var = self.momentum * self.running_var + (1.0 - self.momentum) * var
        self.steps_seen += 1

        return self.gamma * x_hat + self.beta, BatchCache(x_hat, inv_std, mean, var)

    def forward_infer(self, x: np.ndarray) -> np.ndarray:
        """
        Normalize by the frozen running statistics.

        Raises:
            Unfitted: If no training step has updated the running statistics.
        """
        self._check_width(x)
        if not self.fitted:
            raise Unfitted("BatchNorm running statistics are empty; run at least one training step first")
        x_hat = (x - self.running_mean) / np.sqrt(self.running_var + self.eps)
        return self.gamma * x_hat + self.beta

    def backward(self, dy: np.ndarray, cache: BatchCache) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        """
        Backward pass through training-mode normalization.

        Args:
            dy: Gradient of the loss with respect to the outputs
            cache: BatchCache from ``forward_train``

        Returns:
            tuple: Gradient with respect to the input (batch mean and variance
                treated as functions of the batch) and the gamma/beta gradients
        """
        n = dy.shape[0]
        grads = {"gamma": np.sum(dy * cache.x_hat, axis=0), "beta": dy.sum(axis=0)}
        dx_hat = dy * self.gamma
        dx = (cache.inv_std / n) * (
            n * dx_hat - dx_hat.sum(axis=0) - cache.x_hat * np.sum(dx_hat * cache.x_hat, axis=0)
        )
        return dx, grads


class Sigmoid:
    """Logistic activation."""

    kind = "sigmoid"

    def params(self) -> dict[str, np.ndarray]:
        return {}

    def forward(self, x: np.ndarray, training: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Return the activations twice: as output and as the cache for ``backward``."""
        y = sigmoid(x)
        return y, y

    def backward(self, dy: np.ndarray, cache: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        """Scale ``dy`` by y * (1 - y); the layer has no parameters."""
        y = cache
        return dy * y * (1.0 - y), {}


Layer = Dense | BatchNorm | Sigmoid


def dense_forward(layer: Dense, x: np.ndarray) -> np.ndarray:
    """x @ W + b per row."""
    y, _ = layer.forward(np.asarray(x, dtype=np.float64))
    return y


def bn_forward_train(layer: BatchNorm, x: np.ndarray) -> tuple[np.ndarray, BatchCache]:
    """Training-mode BN forward pass; updates the layer's running statistics."""
    return layer.forward_train(np.asarray(x, dtype=np.float64))


def bn_forward_infer(layer: BatchNorm, x: np.ndarray) -> np.ndarray:
    """Inference-mode BN forward pass with frozen running statistics."""
    return layer.forward_infer(np.asarray(x, dtype=np.float64))


def sigmoid(x) -> np.ndarray:
    """Elementwise 1 / (1 + exp(-x)), stable for large |x|."""
    return expit(np.asarray(x, dtype=np.float64))


def softmax(logits) -> np.ndarray:
    """
    Row-wise class probabilities exp(z - logsumexp(z)).

    Args:
        logits: (batch, num_classes) scores

    Returns:
        np.ndarray: Probabilities of the same shape; every row sums to 1
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 2:
        raise DimensionMismatch(f"Logits must be 2-D, got shape {z.shape}")
    return _softmax(z, axis=1)


def softmax_cross_entropy(logits, labels, num_classes: int | None = None) -> tuple[float, np.ndarray]:
    """
    Mean softmax cross-entropy and its gradient with respect to the logits.

    Args:
        logits: (batch, num_classes) scores
        labels: (batch,) class indices
        num_classes: Expected logits width (defaults to the actual width)

    Returns:
        tuple: (loss, gradient) with gradient = (softmax - one_hot) / batch

    Raises:
        DimensionMismatch: If the logits width or batch size does not match.
        LabelOutOfRange: If a label is not an integer in [0, num_classes).
    """
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels)
    if z.ndim != 2:
        raise DimensionMismatch(f"Logits must be 2-D, got shape {z.shape}")
    width = z.shape[1]
    if num_classes is not None and width != num_classes:
        raise DimensionMismatch(f"Logits width {width} != num_classes {num_classes}")
    if y.shape != (z.shape[0],):
        raise DimensionMismatch(f"{y.size} labels for a batch of {z.shape[0]}")
    if y.size and (not np.issubdtype(y.dtype, np.integer) or y.min() < 0 or y.max() >= width):
        raise LabelOutOfRange(f"Labels must be integers in [0, {width}), got {np.unique(y)[:10]}")

    batch = z.shape[0]
    rows = np.arange(batch)
    lse = logsumexp(z, axis=1)
    loss = float(np.mean(lse - z[rows, y]))

    grad = softmax(z)
    grad[rows, y] -= 1.0
    grad /= batch
    return loss, grad


def describe(layer: Any) -> str:
    if isinstance(layer, Dense):
        return f"Dense({layer.in_width}->{layer.out_width})"
    if isinstance(layer, BatchNorm):
        return f"BN({layer.width})"
    return "Sigmoid"
