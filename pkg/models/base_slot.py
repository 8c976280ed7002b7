# models/base_slot.py
from abc import ABC, abstractmethod

import numpy as np

from numerics import Tensor


class NormalizationSlot(ABC):
    """Abstract base for the pluggable normalization stage of a host network."""

    kind: str = ""

    @abstractmethod
    def forward(self, z: Tensor, mode: str = "train") -> Tensor:
        """Normalize an n×d or n×d×h×w latent."""
        raise NotImplementedError

    @abstractmethod
    def commit_statistics(self) -> None:
        """Fold the statistics of the last train-mode pass into the running estimates."""
        raise NotImplementedError

    def parameters(self) -> dict[str, Tensor]:
        return {}

    def set_parameters(self, params: dict[str, Tensor]) -> None:
        if params:
            raise KeyError(f"{type(self).__name__} has no parameters, got {sorted(params)}")

    @abstractmethod
    def state_arrays(self) -> dict[str, np.ndarray]:
        """Non-trainable state for checkpoints."""
        raise NotImplementedError

    @abstractmethod
    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        raise NotImplementedError

    @abstractmethod
    def copy(self) -> "NormalizationSlot":
        raise NotImplementedError
