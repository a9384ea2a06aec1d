# mapdeg/errors.py
from typing import Optional


class MapdegError(Exception):
    """Base class for every error raised by the enumeration engine."""


class SpecValidationError(MapdegError):
    """
    Raised when an input (degree set, weight rule, order, sample size) is
    rejected before any computation starts.
    """

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ConfigurationError(MapdegError):
    """Raised when the application configuration cannot be resolved."""


class InsufficientDataError(MapdegError):
    """Raised when a fit is requested on a table with too few nonzero entries."""


class NumericFailure(MapdegError):
    """Raised when a numerical routine does not converge."""


class SubcriticalError(NumericFailure):
    """The characteristic equation has no solution inside the convergence region."""


class StepSizeError(NumericFailure):
    """Two Richardson levels of a finite difference disagree."""
