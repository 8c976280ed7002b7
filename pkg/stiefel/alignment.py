# stiefel/alignment.py
"""
Concept-alignment objective and its gradient with respect to Q.

A concept batch carries whitened (not yet rotated) representations of one
concept's mini-batch: a ``d×m`` matrix for vector latents or an
``m×d×h×w`` stack of feature maps for convolutional latents.  The objective
sums, over concepts, the mean activation of the concept's samples along its
assigned column of Q; maps are scored with an activation reducer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from reducers import ActivationReducer
from utils.errors import ConfigError, DataError, DimensionError
from .rotation_state import RotationState


@dataclass(frozen=True)
class ConceptBatch:
    axis: int
    whitened: np.ndarray
    name: str = ""

    @property
    def is_map(self) -> bool:
        return self.whitened.ndim == 4

    @property
    def size(self) -> int:
        return self.whitened.shape[0] if self.is_map else self.whitened.shape[1]


def _validate(batches: Sequence[ConceptBatch], dim: int, reducer: ActivationReducer | None) -> None:
    seen: set[int] = set()
    for batch in batches:
        if batch.axis in seen:
            raise ConfigError(f"axis {batch.axis} assigned to more than one concept")
        seen.add(batch.axis)
        if not 0 <= batch.axis < dim:
            raise ConfigError(f"concept axis {batch.axis} outside [0, {dim})")
        arr = batch.whitened
        if arr.ndim not in (2, 4):
            raise DimensionError(f"concept batch must be d x m or m x d x h x w, got {arr.shape}")
        channels = arr.shape[1] if arr.ndim == 4 else arr.shape[0]
        if channels != dim:
            raise DimensionError(f"concept batch has {channels} channels, expected {dim}")
        if batch.size == 0:
            raise DataError(f"concept batch for axis {batch.axis} ({batch.name or 'unnamed'}) is empty")
        if arr.ndim == 4 and reducer is None:
            raise ConfigError("feature-map concept batches need an activation reducer")


def _rotated_maps(q_col: np.ndarray, maps: np.ndarray) -> np.ndarray:
    """Axis activation maps Σ_c q_c·ψ_c for every sample, m×h×w."""
    return np.einsum("c,mchw->mhw", q_col, maps)


def alignment_objective(Q, batches: Sequence[ConceptBatch], reducer: ActivationReducer | None = None) -> float:
    """Σ_j mean activation of concept j along column q_j (to be maximised)."""
    Q = np.asarray(Q, dtype=np.float64)
    _validate(batches, Q.shape[0], reducer)
    total = 0.0
    for batch in batches:
        q = Q[:, batch.axis]
        if batch.is_map:
            total += float(reducer.reduce_many(_rotated_maps(q, batch.whitened)).mean())
        else:
            total += float((q @ batch.whitened).mean())
    return total


def alignment_gradient(batches: Sequence[ConceptBatch], dim: int,
                       reducer: ActivationReducer | None = None, Q=None) -> np.ndarray:
    """Gradient G of the negated objective with respect to Q.

    Column j is minus the mean whitened sample of the concept on axis j; for
    feature maps the spatial mean is weighted by the reducer's subgradient at
    the current Q.  Columns with no concept are zero.
    """
    _validate(batches, dim, reducer)
    grad = np.zeros((dim, dim))
    for batch in batches:
        if batch.is_map:
            if Q is None:
                raise ConfigError("feature-map alignment gradients need the current Q")
            q = np.asarray(Q, dtype=np.float64)[:, batch.axis]
            weights = reducer.subgradient_many(_rotated_maps(q, batch.whitened))
            grad[:, batch.axis] = -np.einsum("mhw,mchw->c", weights, batch.whitened) / batch.size
        else:
            grad[:, batch.axis] = -batch.whitened.mean(axis=1)
    return grad


def momentum_update(state: RotationState, grad) -> np.ndarray:
    """G′ ← βG′ + (1 − β)G, stored on *state* and returned."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != state.grad_momentum.shape:
        raise DimensionError(f"gradient shape {grad.shape} does not match G' {state.grad_momentum.shape}")
    state.grad_momentum = state.beta * state.grad_momentum + (1.0 - state.beta) * grad
    return state.grad_momentum
