# reducers/maxpool_mean_reducer.py
import numpy as np

from numerics import GradientTape, Tensor, backward, ops
from utils.errors import ConfigError
from .base_reducer import ActivationReducer


class MaxPoolMeanReducer(ActivationReducer):
    """Mean of the max-pooled map.

    Pooling uses a ``pool_size`` window and stride with ceil-mode borders, so a
    partial window at the edge pools over the cells it covers.
    """

    kind = "maxpool-mean"

    def __init__(self, pool_size: int = 2):
        if pool_size < 2:
            raise ConfigError(f"maxpool-mean needs pool_size >= 2, got {pool_size}")
        self.pool_size = pool_size

    def _pool(self, maps: Tensor) -> Tensor:
        h, w = maps.shape[-2:]
        stacked = ops.reshape(maps, (-1, 1, h, w))
        pooled = ops.maxpool2d(stacked, self.pool_size)
        return ops.mean(pooled, axis=(1, 2, 3))

    def reduce_many(self, maps):
        maps = np.asarray(maps, dtype=np.float64)
        return self._pool(Tensor(maps)).numpy().reshape(maps.shape[:-2])

    def subgradient_many(self, maps):
        maps = np.asarray(maps, dtype=np.float64)
        x = Tensor(maps, requires_grad=True)
        with GradientTape() as tape:
            total = ops.sum(self._pool(x))
        return backward(total, tape)[x]

    def __repr__(self) -> str:
        return f"MaxPoolMeanReducer(pool_size={self.pool_size})"
