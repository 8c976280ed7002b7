# stiefel/rotation_state.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import polar

from utils.errors import ConfigError, DimensionError

ORTHOGONALITY_TOLERANCE = 1e-5


@dataclass
class RotationState:
    """Orthogonal matrix Q with its gradient-momentum buffer G′.

    ``axis_assignment`` maps a concept name to the column of Q that carries it.
    """

    dim: int
    beta: float = 0.9
    axis_assignment: dict[str, int] = field(default_factory=dict)
    Q: np.ndarray = field(default=None)
    grad_momentum: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigError(f"rotation dimension must be positive, got {self.dim}")
        if not 0.0 <= self.beta < 1.0:
            raise ConfigError(f"beta must lie in [0, 1), got {self.beta}")
        self.Q = np.eye(self.dim) if self.Q is None else np.array(self.Q, dtype=np.float64)
        if self.grad_momentum is None:
            self.grad_momentum = np.zeros((self.dim, self.dim))
        else:
            self.grad_momentum = np.array(self.grad_momentum, dtype=np.float64)
        if self.Q.shape != (self.dim, self.dim) or self.grad_momentum.shape != (self.dim, self.dim):
            raise DimensionError(f"Q and G' must be {self.dim} x {self.dim}")
        for name, axis in self.axis_assignment.items():
            self._check_axis(name, axis)
        axes = list(self.axis_assignment.values())
        if len(set(axes)) != len(axes):
            raise ConfigError(f"duplicate concept axes in assignment {self.axis_assignment}")

    def _check_axis(self, name: str, axis: int) -> None:
        if not 0 <= axis < self.dim:
            raise ConfigError(f"concept '{name}' axis {axis} outside [0, {self.dim})")

    def assign(self, name: str, axis: int) -> None:
        self._check_axis(name, axis)
        if axis in self.axis_assignment.values() and self.axis_assignment.get(name) != axis:
            raise ConfigError(f"axis {axis} is already assigned to another concept")
        self.axis_assignment[name] = axis

    def orthogonality_error(self) -> float:
        """max |QᵀQ − I|."""
        return float(np.abs(self.Q.T @ self.Q - np.eye(self.dim)).max())

    def reorthonormalize(self, tolerance: float = ORTHOGONALITY_TOLERANCE) -> bool:
        """Project Q back onto the orthogonal group if its drift exceeds *tolerance*."""
        drift = self.orthogonality_error()
        if drift <= tolerance:
            return False
        self.Q, _ = polar(self.Q)
        logging.warning(f"Q drifted {drift:.3e} from orthogonality; re-orthonormalised by polar decomposition")
        return True

    def copy(self) -> "RotationState":
        return RotationState(
            dim=self.dim,
            beta=self.beta,
            axis_assignment=dict(self.axis_assignment),
            Q=self.Q.copy(),
            grad_momentum=self.grad_momentum.copy(),
        )


@dataclass(frozen=True)
class SearchParams:
    """Backtracking constants for the curvilinear search."""

    eta0: float = 1.0
    c1: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 20

    def __post_init__(self) -> None:
        if not self.eta0 > 0:
            raise ConfigError(f"search_eta0 must be positive, got {self.eta0}")
        if not 0.0 < self.c1 < 1.0:
            raise ConfigError(f"search_c1 must lie in (0, 1), got {self.c1}")
        if not 0.0 < self.backtrack < 1.0:
            raise ConfigError(f"search_backtrack must lie in (0, 1), got {self.backtrack}")
        if self.max_backtracks < 0:
            raise ConfigError(f"search_max_backtracks must be non-negative, got {self.max_backtracks}")
