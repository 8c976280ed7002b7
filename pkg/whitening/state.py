# whitening/state.py
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from utils.errors import ConfigError

WHITENING_MODES = ("newton", "exact")


@dataclass
class WhiteningState:
    """Batch and running whitening statistics for a ``dim``-channel latent.

    ``batch_mean``/``batch_whitener`` hold the statistics of the most recent
    train-mode pass and are ``None`` until one has happened.  The running
    estimates start at zero mean and identity whitener.
    """

    dim: int
    ema_momentum: float = 0.9
    eps: float = 1e-5
    newton_iters: int = 5
    mode: str = "newton"
    stop_gradient: bool = False
    running_mean: np.ndarray = field(default=None)
    running_whitener: np.ndarray = field(default=None)
    batch_mean: np.ndarray | None = None
    batch_whitener: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigError(f"whitening dimension must be positive, got {self.dim}")
        if not 0.0 <= self.ema_momentum <= 1.0:
            raise ConfigError(f"ema_momentum must lie in [0, 1], got {self.ema_momentum}")
        if self.eps < 0:
            raise ConfigError(f"eps must be non-negative, got {self.eps}")
        if self.newton_iters < 1:
            raise ConfigError(f"newton_iters must be positive, got {self.newton_iters}")
        if self.mode not in WHITENING_MODES:
            raise ConfigError(f"Unknown whitening mode: {self.mode}")
        if self.running_mean is None:
            self.running_mean = np.zeros(self.dim)
        if self.running_whitener is None:
            self.running_whitener = np.eye(self.dim)
        self.running_mean = np.asarray(self.running_mean, dtype=np.float64).reshape(self.dim)
        self.running_whitener = np.asarray(self.running_whitener, dtype=np.float64).reshape(self.dim, self.dim)

    def has_batch_statistics(self) -> bool:
        return self.batch_mean is not None and self.batch_whitener is not None

    def copy(self) -> "WhiteningState":
        return WhiteningState(
            dim=self.dim,
            ema_momentum=self.ema_momentum,
            eps=self.eps,
            newton_iters=self.newton_iters,
            mode=self.mode,
            stop_gradient=self.stop_gradient,
            running_mean=self.running_mean.copy(),
            running_whitener=self.running_whitener.copy(),
            batch_mean=None if self.batch_mean is None else self.batch_mean.copy(),
            batch_whitener=None if self.batch_whitener is None else self.batch_whitener.copy(),
        )
