# metrics/activations.py
"""Reading latents and per-axis concept activations out of a host network."""

from __future__ import annotations

import numpy as np

from reducers import ActivationReducer, MaxPoolMeanReducer

DEFAULT_BATCH = 256


def slot_latents(model, x: np.ndarray, index: int | None = None, mode: str = "eval",
                 batch_size: int = DEFAULT_BATCH) -> np.ndarray:
    """Output of normalization slot *index* (default: the model's CW position)."""
    index = model.cw_layer if index is None else index
    model.check_slot(index)
    chunks = [
        model.slot_output(x[i:i + batch_size], index, mode).numpy()
        for i in range(0, x.shape[0], batch_size)
    ]
    return np.concatenate(chunks, axis=0)


def slot_reducer(model, index: int | None = None, reducer: ActivationReducer | None = None) -> ActivationReducer:
    """The CW layer's own reducer when the slot holds one, else *reducer* or maxpool-mean(2)."""
    if reducer is not None:
        return reducer
    index = model.cw_layer if index is None else index
    layer = getattr(model.slots[index], "layer", None)
    return layer.reducer if layer is not None else MaxPoolMeanReducer(2)


def reduce_latents(latents: np.ndarray, reducer: ActivationReducer) -> np.ndarray:
    """n×d activations from n×d rows or n×d×h×w maps."""
    return reducer.reduce_many(latents) if latents.ndim == 4 else latents


def slot_activations(model, x: np.ndarray, index: int | None = None, reducer: ActivationReducer | None = None,
                     mode: str = "eval") -> np.ndarray:
    """n×d per-axis activations at a slot; feature maps are collapsed by the reducer."""
    return reduce_latents(slot_latents(model, x, index, mode), slot_reducer(model, index, reducer))
