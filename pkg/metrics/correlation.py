# metrics/correlation.py
from __future__ import annotations

import logging

import numpy as np

from utils.errors import MetricError
from .similarity import mean_off_diagonal


def axis_correlation(latents) -> tuple[np.ndarray, np.ndarray]:
    """Absolute Pearson correlation of every axis pair of a d×n latent matrix.

    Returns ``(abs_corr, undefined)``; axes with zero variance get NaN rows and
    columns and are flagged in the boolean *undefined* vector.
    """
    z = np.asarray(latents, dtype=np.float64)
    if z.ndim != 2 or z.shape[1] < 2:
        raise MetricError(f"correlation needs a d x n matrix with n >= 2, got shape {z.shape}")
    centered = z - z.mean(axis=1, keepdims=True)
    std = np.sqrt((centered * centered).mean(axis=1))
    undefined = std == 0
    safe = np.where(undefined, 1.0, std)
    corr = np.abs((centered @ centered.T) / z.shape[1] / np.outer(safe, safe))
    corr = np.minimum(corr, 1.0)
    np.fill_diagonal(corr, 1.0)
    corr[undefined, :] = np.nan
    corr[:, undefined] = np.nan
    if undefined.any():
        logging.warning(f"axes {np.flatnonzero(undefined).tolist()} have zero variance; correlation undefined")
    return corr, undefined


def mean_abs_correlation(latents) -> float:
    """Mean off-diagonal |corr|, ignoring undefined entries."""
    corr, _ = axis_correlation(latents)
    return mean_off_diagonal(corr)


def layerwise_correlation(models, x: np.ndarray) -> list[tuple[int, float]]:
    """Mean off-diagonal |corr| at each model's normalization slot.

    One model per depth (each carrying its slot of interest at ``cw_layer``);
    feature maps are flattened so every spatial position counts as a sample.
    """
    from cw_layers import conv_reshape
    from .activations import slot_latents

    rows = []
    for model in models:
        latents = slot_latents(model, x, model.cw_layer)
        matrix = conv_reshape(latents).numpy() if latents.ndim == 4 else latents.T
        rows.append((model.cw_layer, mean_abs_correlation(matrix)))
    return rows
