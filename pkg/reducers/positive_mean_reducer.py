# reducers/positive_mean_reducer.py
import numpy as np

from .base_reducer import ActivationReducer


class PositiveMeanReducer(ActivationReducer):
    """Mean of the strictly positive cells; 0 for a map with none."""

    kind = "positive-mean"

    def reduce_many(self, maps):
        maps = np.asarray(maps, dtype=np.float64)
        positive = maps > 0
        count = positive.sum(axis=(-2, -1))
        total = np.where(positive, maps, 0.0).sum(axis=(-2, -1))
        return np.divide(total, count, out=np.zeros_like(total), where=count > 0)

    def subgradient_many(self, maps):
        maps = np.asarray(maps, dtype=np.float64)
        positive = maps > 0
        count = positive.sum(axis=(-2, -1), keepdims=True).astype(np.float64)
        weight = np.divide(1.0, count, out=np.zeros_like(count), where=count > 0)
        return positive * weight
