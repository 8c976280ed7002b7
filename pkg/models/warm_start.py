# models/warm_start.py
from __future__ import annotations

import logging
from typing import Any

import numpy as np

from numerics import Tensor, as_tensor, ops
from utils.errors import DimensionError, LabelError, StructureError
from .base_network import HostNetwork
from .batch_norm import BatchNormSlot


def auxiliary_concept_loss(latent, concept_labels, k: int) -> Tensor:
    """Cross entropy of the first *k* latent rows read as concept logits.

    *latent* is d×m (one column per sample); labels lie in 0..k-1.
    """
    latent = as_tensor(latent)
    labels = np.asarray(concept_labels, dtype=np.int64)
    if latent.ndim != 2:
        raise DimensionError(f"latent must be d x m, got {latent.shape}")
    if not 1 <= k <= latent.shape[0]:
        raise DimensionError(f"cannot read {k} concept logits from a {latent.shape[0]}-dim latent")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise LabelError(f"concept labels must lie in [0, {k}), got range [{labels.min()}, {labels.max()}]")
    logits = ops.transpose(ops.index(latent, slice(0, k)))
    return ops.softmax_cross_entropy(logits, labels)


def latent_matrix(latent) -> Tensor:
    """n×d rows or n×d×h×w maps (spatially averaged) → d×n matrix."""
    latent = as_tensor(latent)
    if latent.ndim == 4:
        latent = ops.mean(latent, axis=(2, 3))
    if latent.ndim != 2:
        raise DimensionError(f"latent must be n x d or n x d x h x w, got {latent.shape}")
    return ops.transpose(latent)


def swap_bn_for_cw(model: HostNetwork, index: int, calibration, slot_options: dict[str, Any] | None = None) -> HostNetwork:
    """Copy of *model* whose batch-norm slot *index* is a CW layer.

    Q starts at the identity; the whitening running statistics are fitted on
    one eval-mode pass over *calibration*.  Every other tensor is shared
    unchanged with the source model.
    """
    from utils.config_factory import create_slot_from_config

    model.check_slot(index)
    if not isinstance(model.slots[index], BatchNormSlot):
        raise StructureError(f"slot {index} holds '{model.slots[index].kind}', not batch norm")

    latents = model.forward_to_slot(calibration, index, "eval").numpy()
    options = {**(slot_options or {}), "channels": model.slot_channels[index], "placement": index}
    cw = create_slot_from_config("cw", options)
    mu, w = cw.layer.statistics(latents, "batch")
    cw.layer.whitening.running_mean = mu.copy()
    cw.layer.whitening.running_whitener = w.copy()

    swapped = model.clone()
    swapped.slots[index] = cw
    swapped.variant = "cw"
    swapped.cw_layer = index
    logging.info(f"Swapped batch norm at slot {index} for CW ({latents.shape[0]} calibration samples)")
    return swapped
