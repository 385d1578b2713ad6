"""
Network specs, layout catalogue, Xavier initialization and the layer-stack network.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from src.errors import DimensionMismatch, InvalidKind, InvalidSpec, StaleCache

from .layers import BatchNorm, Dense, Layer, Sigmoid, describe

logger = logging.getLogger(__name__)

DENSE, BATCHNORM, SIGMOID = "dense", "batchnorm", "sigmoid"

# Dense/BN skeletons; sigmoids are inserted by make_layout.
LAYOUT_PATTERNS: dict[str, tuple[str, ...]] = {
    "structure1": ("D", "D", "D"),
    "structure2": ("D", "D", "BN", "D"),
    "structure3": ("D", "BN", "D", "D"),
    "sbnednn": ("D", "BN", "D", "BN", "D"),
}
LAYOUT_ALIASES = {"sbnedn": "sbnednn"}
DEPTH_RANGE = range(3, 8)

BN_LAYOUTS: tuple[str, ...] = ("structure1", "structure2", "structure3", "sbnednn")
DEPTH_LAYOUTS: tuple[str, ...] = tuple(f"depth{k}" for k in DEPTH_RANGE)


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    width: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "width": self.width}


@dataclass(frozen=True)
class NetworkSpec:
    """
    Ordered layer layout of a dense classifier.

    The first layer is Dense, BatchNorm never follows BatchNorm, and the last
    layer is Dense(num_classes) feeding an implicit softmax head.
    """

    layout: tuple[LayerSpec, ...]
    input_dim: int
    num_classes: int = 6
    hidden_width: int = 128
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "layout", tuple(self.layout))
        if self.input_dim < 1 or self.num_classes < 2 or self.hidden_width < 1:
            raise InvalidSpec(
                f"Invalid sizes: input_dim={self.input_dim}, num_classes={self.num_classes}, "
                f"hidden_width={self.hidden_width}"
            )
        if not self.layout or self.layout[0].kind != DENSE:
            raise InvalidSpec("First layer must be Dense")
        last = self.layout[-1]
        if last.kind != DENSE or last.width != self.num_classes:
            raise InvalidSpec(f"Last layer must be Dense({self.num_classes}), got {last}")
        for prev, cur in zip(self.layout, self.layout[1:]):
            if prev.kind == BATCHNORM and cur.kind == BATCHNORM:
                raise InvalidSpec("BatchNorm cannot follow BatchNorm")
        for layer in self.layout:
            if layer.kind not in (DENSE, BATCHNORM, SIGMOID):
                raise InvalidSpec(f"Unknown layer kind '{layer.kind}'")
            if layer.kind == DENSE and (layer.width is None or layer.width < 1):
                raise InvalidSpec(f"Dense layer needs a positive width, got {layer.width}")

    def widths(self) -> list[tuple[int, int]]:
        """(in, out) width of every layer."""
        shapes, width = [], self.input_dim
        for layer in self.layout:
            out = layer.width if layer.kind == DENSE else width
            shapes.append((width, out))
            width = out
        return shapes

    def count(self, kind: str) -> int:
        return sum(1 for layer in self.layout if layer.kind == kind)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "input_dim": self.input_dim,
            "num_classes": self.num_classes,
            "hidden_width": self.hidden_width,
            "layout": [layer.to_dict() for layer in self.layout],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "NetworkSpec":
        return cls(
            layout=tuple(LayerSpec(item["kind"], item.get("width")) for item in payload["layout"]),
            input_dim=int(payload["input_dim"]),
            num_classes=int(payload["num_classes"]),
            hidden_width=int(payload["hidden_width"]),
            name=str(payload.get("name", "custom")),
        )


def normalize_kind(kind: str) -> str:
    """Lower-case a layout name and drop separators ("Depth-5" -> "depth5")."""
    key = re.sub(r"[\s_\-]", "", str(kind)).lower()
    return LAYOUT_ALIASES.get(key, key)


def _pattern(kind: str) -> tuple[str, ...]:
    if kind in LAYOUT_PATTERNS:
        return LAYOUT_PATTERNS[kind]
    match = re.fullmatch(r"depth(\d+)", kind)
    if match and int(match.group(1)) in DEPTH_RANGE:
        k = int(match.group(1))
        return ("D", "BN") * (k - 1) + ("D",)
    valid = [*LAYOUT_PATTERNS, *DEPTH_LAYOUTS]
    raise InvalidKind(f"Unknown layout '{kind}', expected one of {valid}")


def make_layout(kind: str, input_dim: int = 69, num_classes: int = 6, hidden_width: int = 128) -> NetworkSpec:
    """
    Build a named layout.

    Structure1 = D,D,D; Structure2 = D,D,BN,D; Structure3 = D,BN,D,D;
    SBNEDNN = D,BN,D,BN,D; DepthK (3..7) = K Dense layers with BN after every
    hidden Dense. A sigmoid follows every BN, and every hidden Dense that is
    not followed by BN. The final Dense feeds the softmax head directly.

    Args:
        kind: Layout name, case-insensitive ("sbnednn", "structure2", "depth5", ...)
        input_dim: Number of input features
        num_classes: Output width
        hidden_width: Width shared by all hidden Dense layers

    Returns:
        NetworkSpec

    Raises:
        InvalidKind: For an unknown name or a depth outside 3..7.
    """
    name = normalize_kind(kind)
    pattern = _pattern(name)
    last_dense = max(i for i, token in enumerate(pattern) if token == "D")

    layout: list[LayerSpec] = []
    for i, token in enumerate(pattern):
        if token == "BN":
            layout += [LayerSpec(BATCHNORM), LayerSpec(SIGMOID)]
        elif i == last_dense:
            layout.append(LayerSpec(DENSE, num_classes))
        else:
            layout.append(LayerSpec(DENSE, hidden_width))
            if pattern[i + 1] != "BN":
                layout.append(LayerSpec(SIGMOID))
    return NetworkSpec(
        layout=tuple(layout), input_dim=input_dim, num_classes=num_classes, hidden_width=hidden_width, name=name
    )


def xavier_init(spec: NetworkSpec, seed: int | np.random.Generator = 0) -> list[Layer]:
    """
    Instantiate the layers of a spec.

    Dense weights ~ N(0, 2 / (fan_in + fan_out)), biases 0; BN gamma 1, beta 0.
    """
    rng = np.random.default_rng(seed)
    layers: list[Layer] = []
    for layer, (fan_in, fan_out) in zip(spec.layout, spec.widths()):
        if layer.kind == DENSE:
            std = np.sqrt(2.0 / (fan_in + fan_out))
            layers.append(Dense(rng.normal(0.0, std, size=(fan_in, fan_out)), np.zeros(fan_out)))
        elif layer.kind == BATCHNORM:
            layers.append(BatchNorm(fan_in))
        else:
            layers.append(Sigmoid())
    return layers


@dataclass
class ForwardCache:
    """Per-layer caches of one training-mode forward pass."""

    token: int
    version: int
    batch_size: int
    layer_caches: list[Any] = field(default_factory=list)


class Network:
    """
    Layer stack with training/inference forward passes and backpropagation.

    Parameters are exposed as a flat ``{"<layer index>.<name>": array}`` dict
    holding the live arrays, so optimizers update them in place.
    """

    def __init__(self, spec: NetworkSpec, layers: list[Layer] | None = None, seed: int | np.random.Generator = 0):
        self.spec = spec
        self.layers = layers if layers is not None else xavier_init(spec, seed)
        if len(self.layers) != len(spec.layout):
            raise DimensionMismatch(f"{len(self.layers)} layers for a layout of {len(spec.layout)}")
        self._token = 0
        self._version = 0

    @property
    def fitted(self) -> bool:
        """True once every BN layer has seen a training step."""
        return all(layer.fitted for layer in self.layers if isinstance(layer, BatchNorm))

    def parameters(self) -> dict[str, np.ndarray]:
        params = {}
        for i, layer in enumerate(self.layers):
            for name, value in layer.params().items():
                params[f"{i}.{name}"] = value
        return params

    def mark_updated(self) -> None:
        """Invalidate outstanding forward caches after a parameter update."""
        self._version += 1

    def forward_train(self, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
        """Training-mode pass; BN layers use and update batch statistics."""
        out = np.asarray(x, dtype=np.float64)
        self._token += 1
        cache = ForwardCache(token=self._token, version=self._version, batch_size=out.shape[0])
        for layer in self.layers:
            out, layer_cache = layer.forward(out, training=True)
            cache.layer_caches.append(layer_cache)
        return out, cache

    def forward_infer(self, x: np.ndarray) -> np.ndarray:
        """Inference-mode pass; rows are processed independently."""
        out = np.asarray(x, dtype=np.float64)
        if out.ndim != 2 or out.shape[1] != self.spec.input_dim:
            raise DimensionMismatch(f"Network expects {self.spec.input_dim} features, got shape {out.shape}")
        for layer in self.layers:
            out, _ = layer.forward(out, training=False)
        return out

    def backward(self, cache: ForwardCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        """
        Backpropagate a logits gradient through the cached forward pass.

        Returns:
            dict: Gradient for every entry of ``parameters()``

        Raises:
            StaleCache: If the cache is not from the latest forward pass, the
                parameters changed since, or the gradient batch size differs.
        """
        if cache.token != self._token or cache.version != self._version:
            raise StaleCache(
                f"Forward cache {cache.token}/v{cache.version} does not match network state "
                f"{self._token}/v{self._version}"
            )
        dout = np.asarray(dlogits, dtype=np.float64)
        if dout.shape != (cache.batch_size, self.spec.num_classes):
            raise StaleCache(f"Gradient shape {dout.shape} does not match cached batch of {cache.batch_size}")

        grads: dict[str, np.ndarray] = {}
        for i in reversed(range(len(self.layers))):
            dout, layer_grads = self.layers[i].backward(dout, cache.layer_caches[i])
            for name, value in layer_grads.items():
                grads[f"{i}.{name}"] = value
        return grads

    def summary(self) -> str:
        return " -> ".join(describe(layer) for layer in self.layers)


def backward(network: Network, cache: ForwardCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
    """Parameter gradients of a cached forward pass (see ``Network.backward``)."""
    return network.backward(cache, dlogits)
