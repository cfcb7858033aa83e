"""Exception hierarchy shared by all modules."""


class HulthenError(Exception):
    """Base class for library errors."""


class DomainError(HulthenError, ValueError):
    """Argument outside the domain of a function (pole, r < ln q, ...)."""


class UnsupportedError(HulthenError):
    """Input is valid mathematics but outside what the library evaluates."""


class InvalidParameters(HulthenError, ValueError):
    """Potential parameters violate v > 0, q > 0 (or the physical analogue)."""


class NoSuchStateError(HulthenError):
    """Requested state index is not a bound state of the problem."""


class DegenerateParameterError(HulthenError):
    """A hypergeometric lower parameter hits a pole at these parameters."""


class TheoryViolation(HulthenError):
    """An identity that must hold exactly failed (e.g. inexact division)."""


class InexactDivisionError(TheoryViolation):
    """Polynomial long division left a nonzero remainder."""


class InvalidSeedError(TheoryViolation):
    """Darboux seed has a node inside the domain."""


class UnsupportedRepresentationError(UnsupportedError):
    """Closed form exists but is not an ExpPoly (non-integer power of 1 - t)."""

    def __init__(self, message: str, formula: str = ""):
        super().__init__(message)
        self.formula = formula


class ConvergenceError(HulthenError):
    """Adaptive quadrature ran out of depth; carries the best estimate."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UsageError(HulthenError, ValueError):
    """API misuse, e.g. combining ExpPoly objects with different q."""
