# stiefel/cayley.py
import numpy as np

from utils.errors import DimensionError, StepSizeError

# condition number past which (I + η/2·A) is treated as singular
SINGULAR_CONDITION = 1e12


def skew_generator(Q, grad_momentum) -> np.ndarray:
    """A = G′Qᵀ − QG′ᵀ."""
    Q = np.asarray(Q, dtype=np.float64)
    G = np.asarray(grad_momentum, dtype=np.float64)
    if Q.shape != G.shape or Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionError(f"Q {Q.shape} and G' {G.shape} must be equal square matrices")
    return G @ Q.T - Q @ G.T


def cayley_transform(A, Q, eta: float) -> np.ndarray:
    """Q(η) = (I + η/2·A)⁻¹(I − η/2·A)Q."""
    if not np.isfinite(eta):
        raise StepSizeError(f"non-finite step size {eta}")
    eye = np.eye(A.shape[0])
    lhs = eye + 0.5 * eta * A
    rhs = (eye - 0.5 * eta * A) @ Q
    if np.linalg.cond(lhs) > SINGULAR_CONDITION:
        raise StepSizeError(f"I + eta/2 A is singular at eta={eta}")
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as e:
        raise StepSizeError(f"I + eta/2 A is singular at eta={eta}") from e


def cayley_step(Q, grad_momentum, eta: float) -> np.ndarray:
    """One Cayley retraction of Q along −A, keeping Q orthogonal."""
    Q = np.asarray(Q, dtype=np.float64)
    A = skew_generator(Q, grad_momentum)
    return cayley_transform(A, Q, eta)
