from .base_whitener import WhitenerBase
from .state import WHITENING_MODES, WhiteningState
from .whitening_ops import apply, batch_moments, covariance, ema_update, whitener_for
from .zca_exact import ExactZcaWhitener, zca_exact
from .zca_newton import NewtonZcaWhitener, zca_newton

__all__: list[str] = [
    "WHITENING_MODES",
    "ExactZcaWhitener",
    "NewtonZcaWhitener",
    "WhitenerBase",
    "WhiteningState",
    "apply",
    "batch_moments",
    "covariance",
    "ema_update",
    "whitener_for",
    "zca_exact",
    "zca_newton",
]
