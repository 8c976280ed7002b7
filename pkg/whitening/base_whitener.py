# whitening/base_whitener.py
from abc import ABC, abstractmethod

from numerics import Tensor


class WhitenerBase(ABC):
    """Abstract base for ZCA whitening-matrix estimators (exact / Newton)."""

    @abstractmethod
    def whitening_matrix(self, sigma: Tensor) -> Tensor:
        """Return W with W Σ Wᵀ ≈ I for a symmetric PD covariance Σ."""
        raise NotImplementedError
