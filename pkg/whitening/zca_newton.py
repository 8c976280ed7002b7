# whitening/zca_newton.py
"""
Newton-Schulz approximation of the ZCA whitening matrix.

The covariance is normalised by its trace so every eigenvalue lies in
(0, 1], then P ← (3P − P³Σ_N)/2 is iterated from P₀ = I.  P converges to
Σ_N^{-1/2}; the whitener is P/√tr(Σ).  Each iteration is built from tape ops,
so the result is differentiable with respect to Σ.

Convergence is fast for normalised eigenvalues near 1 and slow for small
ones, so a fixed iteration count is accurate only on well-conditioned
covariances.
"""

import numpy as np

from numerics import Tensor, ops
from utils.errors import ConditioningError, ConfigError
from .base_whitener import WhitenerBase


class NewtonZcaWhitener(WhitenerBase):
    def __init__(self, iters: int = 5):
        if iters < 1:
            raise ConfigError(f"newton_iters must be positive, got {iters}")
        self.iters = iters

    def whitening_matrix(self, sigma: Tensor) -> Tensor:
        tr = ops.trace(sigma)
        if not tr.item() > 0:
            raise ConditioningError(f"covariance trace must be positive, got {tr.item():.3e}")
        sigma_n = ops.div(sigma, tr)
        p = Tensor(np.eye(sigma.shape[0]))
        for _ in range(self.iters):
            p_cubed = ops.matmul(ops.matmul(p, p), p)
            p = ops.mul(0.5, ops.sub(ops.mul(3.0, p), ops.matmul(p_cubed, sigma_n)))
        return ops.div(p, ops.sqrt(tr))


def zca_newton(sigma, iters: int = 5) -> np.ndarray:
    return NewtonZcaWhitener(iters).whitening_matrix(Tensor(sigma)).numpy()
