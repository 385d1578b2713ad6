"""
JSON model files and training-log CSV export.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from src.data.processor import Standardizer
from src.errors import FileError, ModelFormatError

from .layers import BatchNorm, Dense, Sigmoid
from .network import Network, NetworkSpec
from .trainer import EpochLog, TrainedModel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def _encode(array: np.ndarray) -> dict[str, Any]:
    return {"shape": list(array.shape), "data": np.asarray(array, dtype=np.float64).ravel().tolist()}


def _decode(payload: dict[str, Any]) -> np.ndarray:
    data = np.asarray(payload["data"], dtype=np.float64)
    return data.reshape(tuple(payload["shape"]))


def model_to_dict(model: TrainedModel) -> dict[str, Any]:
    """JSON-ready document with exact float parameters."""
    layers = []
    for layer in model.network.layers:
        if isinstance(layer, Dense):
            layers.append({"kind": layer.kind, "params": {"W": _encode(layer.W), "b": _encode(layer.b)}})
        elif isinstance(layer, BatchNorm):
            layers.append(
                {
                    "kind": layer.kind,
                    "params": {"gamma": _encode(layer.gamma), "beta": _encode(layer.beta)},
                    "running_mean": _encode(layer.running_mean),
                    "running_var": _encode(layer.running_var),
                    "momentum": layer.momentum,
                    "eps": layer.eps,
                    "steps_seen": layer.steps_seen,
                }
            )
        else:
            layers.append({"kind": layer.kind})
    return {
        "format_version": FORMAT_VERSION,
        "spec": model.spec.to_dict(),
        "layers": layers,
        "standardizer": model.standardizer.to_dict() if model.standardizer is not None else None,
        "training_log": [entry.to_dict() for entry in model.training_log],
        "seed": model.seed,
        "optimizer_steps": model.optimizer_steps,
    }


def model_from_dict(payload: dict[str, Any]) -> TrainedModel:
    """
    Rebuild a model from ``model_to_dict`` output.

    Raises:
        ModelFormatError: On an unknown format version or malformed content.
    """
    if payload.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"Unsupported model format_version {payload.get('format_version')!r}")
    try:
        spec = NetworkSpec.from_dict(payload["spec"])
        layers = []
        for item in payload["layers"]:
            if item["kind"] == "dense":
                layers.append(Dense(_decode(item["params"]["W"]), _decode(item["params"]["b"])))
            elif item["kind"] == "batchnorm":
                gamma = _decode(item["params"]["gamma"])
                bn = BatchNorm(gamma.size, momentum=float(item["momentum"]), eps=float(item["eps"]))
                bn.gamma = gamma
                bn.beta = _decode(item["params"]["beta"])
                bn.running_mean = _decode(item["running_mean"])
                bn.running_var = _decode(item["running_var"])
                bn.steps_seen = int(item["steps_seen"])
                layers.append(bn)
            elif item["kind"] == "sigmoid":
                layers.append(Sigmoid())
            else:
                raise ModelFormatError(f"Unknown layer kind '{item['kind']}'")
        widths = spec.widths()
        for layer, (fan_in, fan_out) in zip(layers, widths):
            if isinstance(layer, Dense) and layer.W.shape != (fan_in, fan_out):
                raise ModelFormatError(f"Dense weights {layer.W.shape} do not match layout ({fan_in}, {fan_out})")
        standardizer = Standardizer.from_dict(payload["standardizer"]) if payload.get("standardizer") else None
        return TrainedModel(
            spec=spec,
            network=Network(spec, layers),
            standardizer=standardizer,
            training_log=[EpochLog(int(e["epoch"]), float(e["mean_loss"]), float(e["train_accuracy"]))
                          for e in payload.get("training_log", [])],
            seed=int(payload.get("seed", 0)),
            optimizer_steps=int(payload.get("optimizer_steps", 0)),
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"Malformed model document: {e}") from e


def save_model(model: TrainedModel, path: str | Path) -> Path:
    """Write the model as one JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=2)
    logger.info("Model saved to %s", path)
    return path


def load_model(path: str | Path) -> TrainedModel:
    """
    Read a model file written by ``save_model``.

    Raises:
        FileError: If the file is missing or unreadable.
        ModelFormatError: If the content is not a valid model document.
    """
    path = Path(path)
    if not path.is_file():
        raise FileError(f"Model file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"Model file {path} is not valid JSON: {e}") from e
    except OSError as e:
        raise FileError(f"Failed to read model file {path}: {e}") from e
    if not isinstance(payload, dict):
        raise ModelFormatError(f"Model file {path} does not hold a JSON object")
    return model_from_dict(payload)


def write_training_log(log: list[EpochLog], path: str | Path) -> Path:
    """Write the epoch log as CSV with columns epoch, mean_loss, train_accuracy."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([entry.to_dict() for entry in log], columns=["epoch", "mean_loss", "train_accuracy"])
    frame.to_csv(path, index=False, lineterminator="\n")
    return path
