"""Exception hierarchy.

Two families matter to callers: invalid input (``DomainError``,
``InfeasibleError``, both ValueError subclasses) and numerical failure
(``NumericError`` and subclasses, RuntimeError). The CLI maps the first
family to exit code 2 and the second to exit code 3.
"""


class GammaDTError(Exception):
    """Base class for all gammadt errors."""


class DomainError(GammaDTError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InfeasibleError(GammaDTError, ValueError):
    """The constraint set is empty (budget too small, T < m*dt, ...)."""


class NumericError(GammaDTError, RuntimeError):
    """A numerical procedure failed (non-convergence, singularity, ...)."""


class BracketError(NumericError):
    """A root could not be bracketed within the allowed search range."""


class InstabilityError(NumericError):
    """The requested evaluation would lose all significant digits."""
