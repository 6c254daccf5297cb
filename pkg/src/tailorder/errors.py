"""Exception hierarchy shared by every module."""


class TailOrderError(Exception):
    """Base class for all package errors."""


class DomainError(TailOrderError, ValueError):
    """An argument lies outside the domain of the operation."""


class AccuracyError(TailOrderError, ArithmeticError):
    """A numeric routine ran out of budget before meeting its tolerance.

    The best available estimate is kept on ``estimate`` (and the error
    estimate on ``error``) so callers may decide to accept it.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NoBracketError(TailOrderError, ValueError):
    """Root bracket could not be established."""


class UnsupportedOperationError(TailOrderError, NotImplementedError):
    """The model or law does not provide this operation."""


class EstimationError(TailOrderError, RuntimeError):
    """Too little usable data for an estimate."""


class EvaluationPointError(TailOrderError, ValueError):
    """Numeric under/overflow at the requested evaluation point."""


class BudgetError(TailOrderError, ValueError):
    """Combinatorial work would exceed the allowed budget."""
