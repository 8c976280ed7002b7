# utils/errors.py
"""
Exception hierarchy shared by every package.

Each error carries the process exit status the CLI reports for it, so
``main.py`` can translate any failure without a lookup table.
"""

from __future__ import annotations


class CwError(Exception):
    """Base class for all concept-whitening errors."""

    exit_code: int = 1

    def __init__(self, message: str = "", *, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step

    def with_step(self, step: int) -> "CwError":
        """Attach the training step at which the error surfaced."""
        self.step = step
        return self

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{msg} (at step {self.step})" if self.step is not None else msg


class ConfigError(CwError, ValueError):
    exit_code = 2


class DataError(CwError):
    exit_code = 3


class DegenerateBatchError(DataError):
    """Batch too small to estimate moments."""


class DimensionError(DataError, ValueError):
    """Operand shapes do not fit the operation."""


class AxisIndexError(DataError, IndexError):
    """Concept axis outside the latent dimension."""


class LabelError(DataError, ValueError):
    pass


class MetricError(DataError):
    """Metric is undefined for the supplied data."""


class DivergenceError(CwError):
    exit_code = 4


class NumericalError(DivergenceError):
    pass


class ConditioningError(NumericalError):
    """Matrix is not positive definite / has non-positive trace."""


class StepSizeError(NumericalError):
    """Cayley system singular for the requested step size."""


class ContractError(CwError):
    """Caller violated an operation precondition."""

    exit_code = 4


class StructureError(CwError):
    exit_code = 5


class UnknownSelectorError(CwError):
    exit_code = 6
