# models/sgd.py
from __future__ import annotations

import numpy as np

from numerics import Tensor
from utils.errors import ConfigError, DivergenceError


def sgd_step(params: dict[str, Tensor], grads: dict[str, np.ndarray], lr: float,
             momentum: float = 0.0, velocity: dict[str, np.ndarray] | None = None) -> dict[str, Tensor]:
    """Classical momentum SGD: v ← μv + g, p ← p − lr·v.

    *velocity* is updated in place when given.  Parameters without a gradient
    are returned unchanged.
    """
    if not lr > 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    if not 0.0 <= momentum < 1.0:
        raise ConfigError(f"momentum must lie in [0, 1), got {momentum}")
    velocity = {} if velocity is None else velocity
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise DivergenceError(f"non-finite gradient for parameter {name}")

    updated: dict[str, Tensor] = {}
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            updated[name] = p
            continue
        v = momentum * velocity[name] + g if name in velocity else np.array(g, dtype=np.float64)
        velocity[name] = v
        updated[name] = Tensor(p.data - lr * v, requires_grad=True)
    return updated


class SGD:
    def __init__(self, lr: float = 0.05, momentum: float = 0.9):
        if not lr > 0:
            raise ConfigError(f"learning rate must be positive, got {lr}")
        if not 0.0 <= momentum < 1.0:
            raise ConfigError(f"momentum must lie in [0, 1), got {momentum}")
        self.lr = lr
        self.momentum = momentum
        self.velocity: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, Tensor], grads: dict[str, np.ndarray]) -> dict[str, Tensor]:
        return sgd_step(params, grads, self.lr, self.momentum, self.velocity)
