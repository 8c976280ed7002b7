# reducers/mean_reducer.py
import numpy as np

from .base_reducer import ActivationReducer


class MeanReducer(ActivationReducer):
    kind = "mean"

    def reduce_many(self, maps):
        return np.asarray(maps, dtype=np.float64).mean(axis=(-2, -1))

    def subgradient_many(self, maps):
        maps = np.asarray(maps, dtype=np.float64)
        return np.full_like(maps, 1.0 / (maps.shape[-2] * maps.shape[-1]))
