# models/cw_slot.py
import numpy as np

from cw_layers import CwLayer
from numerics import Tensor
from whitening import ema_update
from .base_slot import NormalizationSlot


class CwSlot(NormalizationSlot):
    kind = "cw"

    def __init__(self, layer: CwLayer):
        self.layer = layer

    def forward(self, z, mode: str = "train") -> Tensor:
        return self.layer.forward(z, mode)

    def commit_statistics(self) -> None:
        state = self.layer.whitening
        if state.has_batch_statistics():
            ema_update(state)
            state.batch_mean = state.batch_whitener = None

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {
            "running_mean": self.layer.whitening.running_mean,
            "running_whitener": self.layer.whitening.running_whitener,
            "Q": self.layer.rotation.Q,
            "grad_momentum": self.layer.rotation.grad_momentum,
        }

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        d = self.layer.dim
        self.layer.whitening.running_mean = np.asarray(arrays["running_mean"], dtype=np.float64).reshape(d)
        self.layer.whitening.running_whitener = np.asarray(arrays["running_whitener"], dtype=np.float64).reshape(d, d)
        self.layer.rotation.Q = np.asarray(arrays["Q"], dtype=np.float64).reshape(d, d)
        self.layer.rotation.grad_momentum = np.asarray(arrays["grad_momentum"], dtype=np.float64).reshape(d, d)

    def copy(self) -> "CwSlot":
        layer = self.layer
        return CwSlot(CwLayer(layer.whitening.copy(), layer.rotation.copy(), layer.reducer,
                              layer.placement, layer.whitener))
