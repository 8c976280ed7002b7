# reducers/max_reducer.py
import numpy as np

from .base_reducer import ActivationReducer


class MaxReducer(ActivationReducer):
    kind = "max"

    def reduce_many(self, maps):
        return np.asarray(maps, dtype=np.float64).max(axis=(-2, -1))

    def subgradient_many(self, maps):
        maps = np.asarray(maps, dtype=np.float64)
        flat = maps.reshape(-1, maps.shape[-2] * maps.shape[-1])
        grad = np.zeros_like(flat)
        # ties go to the first maximal cell in raster order
        grad[np.arange(flat.shape[0]), flat.argmax(axis=1)] = 1.0
        return grad.reshape(maps.shape)
