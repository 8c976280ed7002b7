# models/batch_norm.py
from __future__ import annotations

import numpy as np

from numerics import Tensor, as_tensor, ops
from utils.errors import ConfigError, DegenerateBatchError, DimensionError
from .base_slot import NormalizationSlot


class BatchNormSlot(NormalizationSlot):
    """Per-channel standardization with a learned scale and shift.

    Running mean and variance follow the same EMA convention as the
    whitening state: running ← momentum·running + (1 − momentum)·batch.
    """

    kind = "bn"

    def __init__(self, channels: int, eps: float = 1e-5, momentum: float = 0.9):
        if channels < 1:
            raise ConfigError(f"batch norm needs at least one channel, got {channels}")
        if not 0.0 <= momentum <= 1.0:
            raise ConfigError(f"batch norm momentum must lie in [0, 1], got {momentum}")
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        self.scale = Tensor(np.ones(channels), requires_grad=True)
        self.shift = Tensor(np.zeros(channels), requires_grad=True)
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)
        self._batch_mean: np.ndarray | None = None
        self._batch_var: np.ndarray | None = None

    def _axes(self, z: Tensor) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if z.ndim == 2:
            return (0,), (1, self.channels)
        if z.ndim == 4:
            return (0, 2, 3), (1, self.channels, 1, 1)
        raise DimensionError(f"batch norm input must be n x d or n x d x h x w, got {z.shape}")

    def forward(self, z, mode: str = "train") -> Tensor:
        z = as_tensor(z)
        if z.shape[1] != self.channels:
            raise DimensionError(f"batch norm has {self.channels} channels, input has {z.shape[1]}")
        axes, bshape = self._axes(z)
        if mode == "train":
            if z.size // self.channels < 2:
                raise DegenerateBatchError("batch norm needs at least 2 values per channel in train mode")
            mean = ops.mean(z, axis=axes, keepdims=True)
            centered = ops.sub(z, mean)
            var = ops.mean(ops.mul(centered, centered), axis=axes, keepdims=True)
            self._batch_mean = mean.numpy().reshape(-1)
            self._batch_var = var.numpy().reshape(-1)
        elif mode == "eval":
            centered = ops.sub(z, self.running_mean.reshape(bshape))
            var = Tensor(self.running_var.reshape(bshape))
        else:
            raise ConfigError(f"Unknown forward mode: {mode}")
        normed = ops.div(centered, ops.sqrt(ops.add(var, self.eps)))
        return ops.add(ops.mul(normed, ops.reshape(self.scale, bshape)), ops.reshape(self.shift, bshape))

    def commit_statistics(self) -> None:
        if self._batch_mean is None:
            return
        m = self.momentum
        self.running_mean = m * self.running_mean + (1.0 - m) * self._batch_mean
        self.running_var = m * self.running_var + (1.0 - m) * self._batch_var
        self._batch_mean = self._batch_var = None

    def parameters(self) -> dict[str, Tensor]:
        return {"scale": self.scale, "shift": self.shift}

    def set_parameters(self, params: dict[str, Tensor]) -> None:
        self.scale = params.get("scale", self.scale)
        self.shift = params.get("shift", self.shift)

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        self.running_mean = np.asarray(arrays["running_mean"], dtype=np.float64).reshape(self.channels)
        self.running_var = np.asarray(arrays["running_var"], dtype=np.float64).reshape(self.channels)

    def copy(self) -> "BatchNormSlot":
        other = BatchNormSlot(self.channels, self.eps, self.momentum)
        other.scale, other.shift = self.scale, self.shift
        other.running_mean = self.running_mean.copy()
        other.running_var = self.running_var.copy()
        return other
