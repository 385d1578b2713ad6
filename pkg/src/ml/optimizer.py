"""
Adam: Bias-corrected adaptive moment optimizer updating parameters in place.
"""

import numpy as np

from src.errors import DimensionMismatch


class AdamState:
    """
    First/second moment estimates and the shared step counter.

    Args:
        lr: Learning rate (default 1e-3)
        beta1: First-moment decay (default 0.9)
        beta2: Second-moment decay (default 0.999)
        eps: Denominator floor (default 1e-8)
    """

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        """
        Apply one update to every parameter.

        Args:
            params: Name -> array, updated in place
            grads: Name -> gradient with the same keys and shapes

        Returns:
            dict: ``params`` (same arrays, updated)

        Raises:
            DimensionMismatch: If keys or shapes of params and grads differ.
        """
        if set(params) != set(grads):
            raise DimensionMismatch(f"Parameter/gradient keys differ: {sorted(set(params) ^ set(grads))}")
        for name, value in params.items():
            if grads[name].shape != value.shape:
                raise DimensionMismatch(f"Gradient of '{name}' has shape {grads[name].shape}, expected {value.shape}")

        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name, value in params.items():
            g = grads[name]
            m = self.m.get(name, np.zeros_like(value))
            v = self.v.get(name, np.zeros_like(value))
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g * g
            self.m[name], self.v[name] = m, v
            value -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
        return params


def adam_step(state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """One bias-corrected Adam update (see ``AdamState.step``)."""
    return state.step(params, grads)
