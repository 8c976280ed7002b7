# cw_layers/cw_layer.py
"""
Concept whitening layer: ZCA whitening followed by the rotation Qᵀ.

Latents arrive as ``n×d`` rows (vector networks) or ``n×d×h×w`` feature maps
(convolutional networks); both are brought to a ``d×columns`` matrix,
whitened and rotated, then restored to their original layout.  Q enters the
forward pass as a constant, so the main objective never moves it.
"""

from __future__ import annotations

import numpy as np

from numerics import Tensor, as_array, as_tensor, ops
from reducers import ActivationReducer, MaxPoolMeanReducer
from stiefel import ConceptBatch, RotationState
from utils.errors import AxisIndexError, ConfigError, DimensionError
from whitening import WhitenerBase, WhiteningState, apply, batch_moments, whitener_for
from .conv_reshape import conv_reshape, conv_unreshape


class CwLayer:
    def __init__(
        self,
        whitening: WhiteningState,
        rotation: RotationState | None = None,
        reducer: ActivationReducer | None = None,
        placement: int = 0,
        whitener: WhitenerBase | None = None,
    ):
        self.whitening = whitening
        self.rotation = rotation or RotationState(whitening.dim)
        if self.rotation.dim != whitening.dim:
            raise DimensionError(
                f"rotation dimension {self.rotation.dim} differs from whitening dimension {whitening.dim}"
            )
        self.reducer = reducer or MaxPoolMeanReducer(2)
        self.placement = placement
        self.whitener = whitener or whitener_for(whitening)

    @property
    def dim(self) -> int:
        return self.whitening.dim

    # ── Forward ───────────────────────────────────────────────────────────────
    def forward_vector(self, z, mode: str = "train") -> Tensor:
        """Qᵀ·W·(Z − μ1ᵀ) for a d×m matrix Z."""
        white = apply(self.whitening, z, mode, self.whitener)
        return ops.matmul(Tensor(self.rotation.Q.T), white)

    def forward(self, z, mode: str = "train") -> Tensor:
        """CW output in the latent's own layout (n×d or n×d×h×w)."""
        z = as_tensor(z)
        if z.ndim == 2:
            self._check_channels(z.shape[1])
            return ops.transpose(self.forward_vector(ops.transpose(z), mode))
        if z.ndim == 4:
            self._check_channels(z.shape[1])
            return conv_unreshape(self.forward_vector(conv_reshape(z), mode), z.shape)
        raise DimensionError(f"CW input must be n x d or n x d x h x w, got {z.shape}")

    def _check_channels(self, channels: int) -> None:
        if channels != self.dim:
            raise DimensionError(f"CW layer has {self.dim} channels, input has {channels}")

    # ── Whitening without rotation (alignment inputs) ─────────────────────────
    def statistics(self, latents, stats: str = "running") -> tuple[np.ndarray, np.ndarray]:
        """(μ, W) from the running estimates or fitted on *latents* without touching state."""
        if stats == "running":
            return self.whitening.running_mean, self.whitening.running_whitener
        if stats != "batch":
            raise ConfigError(f"Unknown whitening statistics source: {stats}")
        mu, sigma = batch_moments(_as_matrix(latents), self.whitening.eps)
        return mu.numpy().reshape(-1), self.whitener.whitening_matrix(sigma).numpy()

    def whiten(self, latents, stats: str = "running", moments: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
        """ψ(Z) in the latent's own layout, without the rotation."""
        latents = as_array(latents)
        self._check_channels(latents.shape[1])
        mu, w = moments if moments is not None else self.statistics(latents, stats)
        if latents.ndim == 2:
            return (latents - mu) @ w.T
        return np.einsum("ec,nchw->nehw", w, latents - mu[None, :, None, None])

    def concept_batch(self, axis: int, latents, name: str = "", stats: str = "running",
                      moments: tuple[np.ndarray, np.ndarray] | None = None) -> ConceptBatch:
        white = self.whiten(latents, stats, moments)
        if white.ndim == 2:
            white = white.T
        return ConceptBatch(axis=axis, whitened=np.ascontiguousarray(white), name=name)

    # ── Concept scores ────────────────────────────────────────────────────────
    def concept_activations(self, latents, mode: str = "eval") -> np.ndarray:
        """n×d matrix of per-axis activations; maps are collapsed by the reducer."""
        out = self.forward(as_array(latents), mode).numpy()
        return self.reduce_output(out)

    def reduce_output(self, out: np.ndarray) -> np.ndarray:
        if out.ndim == 4:
            return self.reducer.reduce_many(out)
        return out

    def concept_activation(self, latent, axis: int, mode: str = "eval") -> float:
        """Activation of a single latent sample (d or d×h×w) on one axis."""
        if not 0 <= axis < self.dim:
            raise AxisIndexError(f"axis {axis} outside [0, {self.dim})")
        latent = as_array(latent)
        return float(self.concept_activations(latent[None], mode)[0, axis])


def _as_matrix(latents) -> np.ndarray:
    latents = as_array(latents)
    if latents.ndim == 2:
        return latents.T
    if latents.ndim == 4:
        return conv_reshape(latents).numpy()
    raise DimensionError(f"latents must be n x d or n x d x h x w, got {latents.shape}")
