# models/cnn.py
from __future__ import annotations

from typing import Any

import numpy as np

from numerics import Tensor, ops
from .base_network import HostNetwork, init_weight
from .mlp import linear

CONV_CHANNELS = (8, 16)
KERNEL = 3
POOL = 2


class ConvNetwork(HostNetwork):
    """Two conv blocks (3×3 conv → slot → relu → 2×2 maxpool) and a linear head."""

    arch = "cnn"

    def __init__(self, input_shape: tuple[int, int, int], n_classes: int, variant: str = "bn",
                 cw_layer: int = 0, rng: np.random.Generator | None = None,
                 slot_options: dict[str, Any] | None = None):
        super().__init__(input_shape, n_classes, variant, cw_layer)
        rng = rng or np.random.default_rng(0)
        c_in, h, w = self.input_shape
        self.weights = {}
        for i, c_out in enumerate(CONV_CHANNELS):
            fan_in = c_in * KERNEL * KERNEL
            self.weights[f"conv{i + 1}.weight"] = init_weight(rng, (c_out, c_in, KERNEL, KERNEL), fan_in)
            self.weights[f"conv{i + 1}.bias"] = Tensor(np.zeros(c_out), requires_grad=True)
            c_in = c_out
            h, w = -(-h // POOL), -(-w // POOL)
        flat = c_in * h * w
        self.weights["head.weight"] = init_weight(rng, (flat, n_classes), flat)
        self.weights["head.bias"] = Tensor(np.zeros(n_classes), requires_grad=True)
        self._build_slots(slot_options)

    @property
    def slot_channels(self) -> list[int]:
        return list(CONV_CHANNELS)

    def _pre(self, i, h):
        layer = f"conv{i + 1}"
        return ops.conv2d(h, self.weights[f"{layer}.weight"], self.weights[f"{layer}.bias"],
                          padding=KERNEL // 2)

    def _post(self, i, h):
        return ops.maxpool2d(ops.relu(h), POOL)

    def _head(self, h):
        flat = ops.reshape(h, (h.shape[0], -1))
        return linear(flat, self.weights["head.weight"], self.weights["head.bias"])

    def hyperparameters(self) -> dict[str, Any]:
        return {}
