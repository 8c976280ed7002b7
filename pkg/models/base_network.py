# models/base_network.py
"""
Host networks f(x) = g(Φ(x; θ); ω) built from stages.

Stage i applies ``_pre(i, ·)`` (a linear or conv layer), then the
normalization slot i, then ``_post(i, ·)`` (nonlinearity / pooling).  The
classifier head follows the last stage.  Any slot may hold batch norm or a
CW layer; ``forward_to_slot`` and ``forward_from_slot`` split the network
around one slot so metrics can read and replace the latent there.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from numerics import Tensor, as_tensor
from utils.errors import ConfigError, DimensionError, StructureError
from .base_slot import NormalizationSlot

SLOT_VARIANTS = ("bn", "cw", "bn_aux")


class HostNetwork(ABC):
    arch: str = ""

    def __init__(self, input_shape: tuple[int, ...], n_classes: int, variant: str = "bn", cw_layer: int = 0):
        if n_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {n_classes}")
        if variant not in SLOT_VARIANTS:
            raise ConfigError(f"Unknown slot variant: {variant}")
        self.input_shape = tuple(int(s) for s in input_shape)
        self.n_classes = n_classes
        self.variant = variant
        self.cw_layer = cw_layer
        self.weights: dict[str, Tensor] = {}
        self.slots: list[NormalizationSlot] = []

    # ── Architecture hooks ────────────────────────────────────────────────────
    @property
    @abstractmethod
    def slot_channels(self) -> list[int]:
        """Channel count d at every slot."""
        raise NotImplementedError

    @abstractmethod
    def _pre(self, i: int, h: Tensor) -> Tensor:
        raise NotImplementedError

    @abstractmethod
    def _post(self, i: int, h: Tensor) -> Tensor:
        raise NotImplementedError

    @abstractmethod
    def _head(self, h: Tensor) -> Tensor:
        raise NotImplementedError

    @abstractmethod
    def hyperparameters(self) -> dict[str, Any]:
        raise NotImplementedError

    def _build_slots(self, slot_options: dict[str, Any] | None = None) -> None:
        from utils.config_factory import create_slot_from_config

        channels = self.slot_channels
        if not 0 <= self.cw_layer < len(channels):
            raise StructureError(f"{self.arch} has slots 0..{len(channels) - 1}, no slot {self.cw_layer}")
        options = dict(slot_options or {})
        self.slots = []
        for i, width in enumerate(channels):
            kind = "cw" if self.variant == "cw" and i == self.cw_layer else "bn"
            self.slots.append(create_slot_from_config(kind, {**options, "channels": width, "placement": i}))

    # ── Forward ───────────────────────────────────────────────────────────────
    @property
    def n_slots(self) -> int:
        return len(self.slots)

    def check_slot(self, index: int) -> None:
        if not 0 <= index < self.n_slots:
            raise StructureError(f"{self.arch} has slots 0..{self.n_slots - 1}, no slot {index}")

    def _check_input(self, x: Tensor) -> None:
        if x.ndim != len(self.input_shape) + 1 or x.shape[1:] != self.input_shape:
            raise DimensionError(f"{self.arch} expects inputs of shape (n, {self.input_shape}), got {x.shape}")

    def forward_to_slot(self, x, index: int, mode: str = "train") -> Tensor:
        """Latent entering slot *index* (after its linear/conv layer)."""
        self.check_slot(index)
        h = as_tensor(x)
        self._check_input(h)
        for i in range(index):
            h = self._post(i, self.slots[i].forward(self._pre(i, h), mode))
        return self._pre(index, h)

    def forward_from_slot(self, normalized, index: int, mode: str = "train") -> Tensor:
        """Logits given the output of slot *index*."""
        self.check_slot(index)
        h = self._post(index, as_tensor(normalized))
        for i in range(index + 1, self.n_slots):
            h = self._post(i, self.slots[i].forward(self._pre(i, h), mode))
        return self._head(h)

    def slot_output(self, x, index: int, mode: str = "train") -> Tensor:
        return self.slots[index].forward(self.forward_to_slot(x, index, mode), mode)

    def forward(self, x, mode: str = "train") -> Tensor:
        return self.forward_from_slot(self.slot_output(x, 0, mode), 0, mode)

    def predict(self, x) -> np.ndarray:
        return self.forward(x, "eval").numpy().argmax(axis=1)

    # ── Parameters ────────────────────────────────────────────────────────────
    def parameters(self) -> dict[str, Tensor]:
        params = dict(self.weights)
        for i, slot in enumerate(self.slots):
            for name, tensor in slot.parameters().items():
                params[f"slot{i}.{name}"] = tensor
        return params

    def set_parameters(self, params: dict[str, Tensor]) -> None:
        slot_params: dict[int, dict[str, Tensor]] = {}
        for name, tensor in params.items():
            if name.startswith("slot"):
                head, _, key = name.partition(".")
                slot_params.setdefault(int(head[4:]), {})[key] = tensor
            elif name in self.weights:
                self.weights[name] = tensor
            else:
                raise KeyError(f"unknown parameter {name}")
        for i, group in slot_params.items():
            self.slots[i].set_parameters(group)

    def commit_statistics(self) -> None:
        for slot in self.slots:
            slot.commit_statistics()

    @property
    def cw_slot(self):
        from .cw_slot import CwSlot

        for slot in self.slots:
            if isinstance(slot, CwSlot):
                return slot
        return None

    def descriptor(self) -> dict[str, Any]:
        return {
            "arch": self.arch,
            "input_shape": list(self.input_shape),
            "n_classes": self.n_classes,
            "variant": self.variant,
            "cw_layer": self.cw_layer,
            "slots": [slot.kind for slot in self.slots],
            **self.hyperparameters(),
        }

    def clone(self) -> "HostNetwork":
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.weights = dict(self.weights)
        other.slots = [slot.copy() for slot in self.slots]
        return other


def init_weight(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> Tensor:
    """He-normal initialisation."""
    return Tensor(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape), requires_grad=True)
