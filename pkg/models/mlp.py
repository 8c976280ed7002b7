# models/mlp.py
from __future__ import annotations

from typing import Any

import numpy as np

from numerics import Tensor, ops
from .base_network import HostNetwork, init_weight


def linear(h: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return ops.add(ops.matmul(h, weight), bias)


class MlpNetwork(HostNetwork):
    """fc1 → slot0 → relu → fc2 → slot1 → relu → head."""

    arch = "mlp"

    def __init__(self, input_dim: int, n_classes: int, hidden: int = 32, variant: str = "bn",
                 cw_layer: int = 0, rng: np.random.Generator | None = None,
                 slot_options: dict[str, Any] | None = None):
        super().__init__((input_dim,), n_classes, variant, cw_layer)
        rng = rng or np.random.default_rng(0)
        self.hidden = hidden
        self.weights = {
            "fc1.weight": init_weight(rng, (input_dim, hidden), input_dim),
            "fc1.bias": Tensor(np.zeros(hidden), requires_grad=True),
            "fc2.weight": init_weight(rng, (hidden, hidden), hidden),
            "fc2.bias": Tensor(np.zeros(hidden), requires_grad=True),
            "head.weight": init_weight(rng, (hidden, n_classes), hidden),
            "head.bias": Tensor(np.zeros(n_classes), requires_grad=True),
        }
        self._build_slots(slot_options)

    @property
    def slot_channels(self) -> list[int]:
        return [self.hidden, self.hidden]

    def _pre(self, i, h):
        layer = f"fc{i + 1}"
        return linear(h, self.weights[f"{layer}.weight"], self.weights[f"{layer}.bias"])

    def _post(self, i, h):
        return ops.relu(h)

    def _head(self, h):
        return linear(h, self.weights["head.weight"], self.weights["head.bias"])

    def hyperparameters(self) -> dict[str, Any]:
        return {"hidden": self.hidden}
