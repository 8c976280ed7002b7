# reducers/base_reducer.py
from abc import ABC, abstractmethod

import numpy as np

from utils.errors import DimensionError


class ActivationReducer(ABC):
    """Collapses a post-CW feature map to one concept-activation score.

    Subclasses implement the batched forms over arrays shaped ``(..., h, w)``.
    """

    kind: str = ""

    @abstractmethod
    def reduce_many(self, maps: np.ndarray) -> np.ndarray:
        """Scores for every map in a ``(..., h, w)`` stack."""
        raise NotImplementedError

    @abstractmethod
    def subgradient_many(self, maps: np.ndarray) -> np.ndarray:
        """d score / d map for every map, same shape as *maps*."""
        raise NotImplementedError

    def reduce(self, fmap) -> float:
        fmap = _as_maps(fmap)
        return float(self.reduce_many(fmap[None])[0])

    def subgradient(self, fmap) -> np.ndarray:
        fmap = _as_maps(fmap)
        return self.subgradient_many(fmap[None])[0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


def _as_maps(fmap) -> np.ndarray:
    fmap = np.asarray(fmap, dtype=np.float64)
    if fmap.ndim != 2 or fmap.size == 0:
        raise DimensionError(f"feature map must be a nonempty h x w array, got shape {fmap.shape}")
    return fmap
