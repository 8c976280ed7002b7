# whitening/whitening_ops.py
from __future__ import annotations

import logging

import numpy as np

from numerics import Tensor, as_tensor, ops
from utils.errors import ConfigError, DegenerateBatchError, DimensionError
from .base_whitener import WhitenerBase
from .state import WhiteningState


def batch_moments(z, eps: float = 1e-5) -> tuple[Tensor, Tensor]:
    """Column mean μ (d×1) and ridge-regularised covariance Σ of a d×n batch."""
    z = as_tensor(z)
    if z.ndim != 2:
        raise DimensionError(f"batch must be a d x n matrix, got shape {z.shape}")
    n = z.shape[1]
    if n < 2:
        raise DegenerateBatchError(f"whitening needs at least 2 samples, got {n}")
    mu = ops.mean(z, axis=1, keepdims=True)
    zc = ops.sub(z, mu)
    sigma = ops.div(ops.matmul(zc, ops.transpose(zc)), float(n))
    sigma = ops.add(sigma, eps * np.eye(z.shape[0]))
    return mu, sigma


def whitener_for(state: WhiteningState) -> WhitenerBase:
    from utils.config_factory import create_whitener_from_config

    return create_whitener_from_config(state.mode, {"iters": state.newton_iters})


def apply(state: WhiteningState, z, mode: str = "train", whitener: WhitenerBase | None = None) -> Tensor:
    """Whiten a d×n batch.

    Train mode fits μ and W on the batch (tape-recorded unless the state's
    stop_gradient flag is set) and stashes them on ``state`` for a later
    :func:`ema_update`.  Eval mode uses the running estimates and leaves the
    state untouched.
    """
    z = as_tensor(z)
    if z.ndim != 2 or z.shape[0] != state.dim:
        raise DimensionError(f"expected a {state.dim} x n batch, got shape {z.shape}")

    if mode == "eval":
        mu = Tensor(state.running_mean.reshape(-1, 1))
        w = Tensor(state.running_whitener)
        return ops.matmul(w, ops.sub(z, mu))
    if mode != "train":
        raise ConfigError(f"Unknown whitening apply mode: {mode}")

    whitener = whitener or whitener_for(state)
    mu, sigma = batch_moments(z, state.eps)
    if state.stop_gradient:
        mu, sigma = ops.stop_gradient(mu), ops.stop_gradient(sigma)
    w = whitener.whitening_matrix(sigma)
    state.batch_mean = mu.numpy().reshape(-1)
    state.batch_whitener = w.numpy()
    return ops.matmul(w, ops.sub(z, mu))


def ema_update(state: WhiteningState, batch_mean=None, batch_whitener=None) -> WhiteningState:
    """running ← m·running + (1 − m)·batch for both μ and W.

    Defaults to the statistics stashed by the last train-mode :func:`apply`.
    """
    m = state.ema_momentum
    if not 0.0 <= m <= 1.0:
        raise ConfigError(f"ema_momentum must lie in [0, 1], got {m}")
    mu = state.batch_mean if batch_mean is None else np.asarray(batch_mean, dtype=np.float64).reshape(-1)
    w = state.batch_whitener if batch_whitener is None else np.asarray(batch_whitener, dtype=np.float64)
    if mu is None or w is None:
        logging.warning("ema_update called before any train-mode pass; running statistics unchanged")
        return state
    if mu.shape != (state.dim,) or w.shape != (state.dim, state.dim):
        raise DimensionError(f"batch statistics shapes {mu.shape}, {w.shape} do not match dim {state.dim}")
    state.running_mean = m * state.running_mean + (1.0 - m) * mu
    state.running_whitener = m * state.running_whitener + (1.0 - m) * w
    return state


def covariance(x) -> np.ndarray:
    """Biased (1/n) covariance of the rows of a d×n array."""
    x = np.asarray(x.data if isinstance(x, Tensor) else x, dtype=np.float64)
    xc = x - x.mean(axis=1, keepdims=True)
    return xc @ xc.T / x.shape[1]
