# metrics/occlusion.py
"""
Empirical receptive fields by occlusion.

A p×p patch slides over the image with stride s; each placement is scored by
how much the axis activation drops relative to the unoccluded image.  Cells
whose drop exceeds a quantile of all drops form the receptive field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from reducers import ActivationReducer
from utils.errors import ConfigError
from .activations import slot_activations

DEFAULT_QUANTILE = 0.9


@dataclass(frozen=True)
class OcclusionResult:
    drops: np.ndarray            # rows × cols activation drops
    receptive_field: np.ndarray  # boolean mask, same shape
    baseline: float
    patch: int
    stride: int

    def argmax_cell(self) -> tuple[int, int]:
        row, col = np.unravel_index(int(np.argmax(self.drops)), self.drops.shape)
        return int(row), int(col)


def default_patch(side: int) -> int:
    return max(1, side // 4)


def default_stride(side: int) -> int:
    return max(1, math.ceil(side / 12))


def _starts(extent: int, patch: int, stride: int) -> list[int]:
    return list(range(0, extent - patch + 1, stride))


def occlusion_map(model, image: np.ndarray, axis: int, patch: int | None = None, stride: int | None = None,
                  fill: float | None = 0.0, quantile: float = DEFAULT_QUANTILE,
                  reducer: ActivationReducer | None = None) -> OcclusionResult:
    """Activation drop on *axis* for every patch placement over a c×h×w image.

    ``fill=None`` leaves the patch region untouched.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3:
        raise ConfigError(f"occlusion needs a c x h x w image, got shape {image.shape}")
    _, h, w = image.shape
    patch = patch or default_patch(min(h, w))
    stride = stride or default_stride(min(h, w))
    if patch > h or patch > w:
        raise ConfigError(f"patch {patch} larger than image {h}x{w}")
    if patch < 1 or stride < 1:
        raise ConfigError(f"patch and stride must be positive, got {patch}, {stride}")
    if not 0.0 <= quantile <= 1.0:
        raise ConfigError(f"quantile must lie in [0, 1], got {quantile}")

    rows, cols = _starts(h, patch, stride), _starts(w, patch, stride)
    batch = np.repeat(image[None], 1 + len(rows) * len(cols), axis=0)
    if fill is not None:
        k = 1
        for r in rows:
            for c in cols:
                batch[k, :, r:r + patch, c:c + patch] = fill
                k += 1
    acts = slot_activations(model, batch, reducer=reducer)[:, axis]
    baseline = float(acts[0])
    drops = (baseline - acts[1:]).reshape(len(rows), len(cols))
    threshold = np.quantile(drops, quantile)
    receptive = (drops >= threshold) & (drops > 0)
    return OcclusionResult(drops, receptive, baseline, patch, stride)
