"""Exception hierarchy shared by every module."""

from typing import List, Optional, Sequence


class PersianCarpetError(Exception):
    """Base class of all package errors."""


class NumericalFailure(PersianCarpetError, ArithmeticError):
    """An iterative method hit its cap without converging.

    The best iterates reached are kept so that callers can inspect (or
    accept) them.
    """

    def __init__(self, message: str, best_iterates: Optional[Sequence] = None):
        super().__init__(message)
        self.best_iterates: List = list(best_iterates) if best_iterates is not None else []


class DegenerateEvaluation(PersianCarpetError, ArithmeticError):
    """Numerator and denominator vanish together (0/0)."""


class DomainError(PersianCarpetError, ValueError):
    """Input outside the mathematically admissible domain."""


class BudgetError(PersianCarpetError, ValueError):
    """A search or enumeration would exceed its size budget."""


class ConfigError(PersianCarpetError, ValueError):
    """Invalid job configuration."""
