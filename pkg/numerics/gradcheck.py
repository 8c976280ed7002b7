# numerics/gradcheck.py
"""Central finite-difference checks for tape gradients."""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np

from .tensor import GradientTape, Tensor, backward

ScalarFn = Callable[..., Tensor]


def numerical_gradient(fn: ScalarFn, arrays: Sequence[np.ndarray], which: int, h: float = 1e-5) -> np.ndarray:
    """Central difference of ``fn(*arrays)`` w.r.t. ``arrays[which]``."""
    base = [np.array(a, dtype=np.float64) for a in arrays]
    grad = np.zeros_like(base[which])
    flat = base[which].reshape(-1)
    out = grad.reshape(-1)
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + h
        plus = fn(*(Tensor(a) for a in base)).item()
        flat[idx] = orig - h
        minus = fn(*(Tensor(a) for a in base)).item()
        flat[idx] = orig
        out[idx] = (plus - minus) / (2.0 * h)
    return grad


def analytic_gradients(fn: ScalarFn, arrays: Sequence[np.ndarray]) -> list[np.ndarray]:
    leaves = [Tensor(a, requires_grad=True) for a in arrays]
    with GradientTape() as tape:
        loss = fn(*leaves)
    grads = backward(loss, tape, sources=leaves)
    return [grads[leaf] for leaf in leaves]


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Norm-wise relative error; 0 when both are zero."""
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(fn: ScalarFn, arrays: Sequence[np.ndarray], h: float = 1e-5) -> float:
    """Worst relative error between tape and finite-difference gradients."""
    worst = 0.0
    for i, grad in enumerate(analytic_gradients(fn, arrays)):
        err = relative_error(grad, numerical_gradient(fn, arrays, i, h))
        logging.debug(f"gradcheck input {i}: relative error {err:.3e}")
        worst = max(worst, err)
    return worst
