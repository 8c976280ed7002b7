# stiefel/curvilinear_search.py
"""
Backtracking search for the Cayley step size.

Starting from η₀ the step is shrunk by ``backtrack`` until the Armijo
condition along the Cayley curve holds:

    f(Q(η)) ≤ f(Q) − c1·η·‖A‖²_F / 2

where f is the objective to minimise and −‖A‖²_F/2 is its slope at η = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from utils.errors import NumericalError, StepSizeError
from .cayley import cayley_transform, skew_generator
from .rotation_state import SearchParams


@dataclass(frozen=True)
class SearchResult:
    eta: float
    accepted: bool
    q_next: np.ndarray
    value: float
    initial_value: float
    n_evals: int

    @property
    def decreased(self) -> bool:
        return self.value < self.initial_value


def curvilinear_search(Q, grad_momentum, objective_eval: Callable[[np.ndarray], float],
                       params: SearchParams | None = None) -> SearchResult:
    """Find η satisfying the Armijo condition along the Cayley curve.

    When the backtracking budget runs out the smallest tried η is returned
    with ``accepted=False``.  Raises NumericalError if the objective was
    non-finite at every tried step.
    """
    params = params or SearchParams()
    Q = np.asarray(Q, dtype=np.float64)
    A = skew_generator(Q, grad_momentum)
    f0 = float(objective_eval(Q))
    n_evals = 1
    slope = 0.5 * float(np.sum(A * A))
    if slope == 0.0:
        return SearchResult(params.eta0, True, Q.copy(), f0, f0, n_evals)

    eta = params.eta0
    fallback: tuple[float, np.ndarray, float] | None = None
    for attempt in range(params.max_backtracks + 1):
        try:
            candidate = cayley_transform(A, Q, eta)
        except StepSizeError as e:
            logging.debug(f"curvilinear search: {e}; shrinking step")
            eta *= params.backtrack
            continue
        value = float(objective_eval(candidate))
        n_evals += 1
        if np.isfinite(value):
            if value <= f0 - params.c1 * eta * slope:
                logging.debug(f"curvilinear search accepted eta={eta:.4g} after {attempt} backtracks")
                return SearchResult(eta, True, candidate, value, f0, n_evals)
            fallback = (eta, candidate, value)
        if attempt < params.max_backtracks:
            eta *= params.backtrack

    if fallback is None:
        raise NumericalError("curvilinear search: objective non-finite at every tried step")
    eta, candidate, value = fallback
    logging.warning(
        f"curvilinear search exhausted {params.max_backtracks} backtracks; "
        f"returning eta={eta:.4g} without sufficient decrease"
    )
    return SearchResult(eta, False, candidate, value, f0, n_evals)
