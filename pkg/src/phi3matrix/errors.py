"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class Phi3Error(Exception):
    """Base class for every error raised by the package."""


class InputError(Phi3Error, ValueError):
    """Malformed or out-of-range arguments."""


class DomainError(Phi3Error, ValueError):
    """Evaluation requested on a branch cut or outside the admissible region."""


class ConvergenceError(Phi3Error, RuntimeError):
    """An iterative solver failed to converge.

    ``trace`` holds the iterate or residual history for diagnosis.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class QuadratureError(Phi3Error, RuntimeError):
    """Numerical integration did not reach the requested accuracy."""

    def __init__(self, message: str, error_estimate: float | None = None):
        super().__init__(message)
        self.error_estimate = error_estimate


class SingularityError(Phi3Error, ZeroDivisionError):
    """A formula hit a genuine singularity (zero constant term, rho_0 = 0, ...)."""


class ConditioningError(Phi3Error, RuntimeError):
    """A linear system is numerically singular."""

    def __init__(self, message: str, condition_number: float | None = None):
        super().__init__(message)
        self.condition_number = condition_number


class InconsistencyError(Phi3Error, AssertionError):
    """An internal exact consistency relation failed. Never expected to fire."""
