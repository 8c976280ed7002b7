# whitening/zca_exact.py
import numpy as np

from numerics import Tensor, ops
from .base_whitener import WhitenerBase


class ExactZcaWhitener(WhitenerBase):
    """ZCA whitener from the eigendecomposition, W = D Λ^{-1/2} Dᵀ."""

    def whitening_matrix(self, sigma: Tensor) -> Tensor:
        return ops.sym_inv_sqrt(sigma)


def zca_exact(sigma) -> np.ndarray:
    """Plain-array convenience wrapper; raises ConditioningError for non-PD input."""
    return ExactZcaWhitener().whitening_matrix(Tensor(sigma)).numpy()
