"""Exception hierarchy shared by every module of the package."""


class GenrepError(Exception):
    """Base class for all package errors."""


class CtxMismatch(GenrepError, TypeError):
    """Operands live in different fields or coefficient rings."""


class NotInvertible(GenrepError, ZeroDivisionError):
    """Attempted to invert a non-unit."""


# field elements and scalars share one division error
DivisionByZero = NotInvertible


class DimensionMismatch(GenrepError, ValueError):
    """Shapes of matrices / Hom-sets do not compose."""


class BudgetExceeded(GenrepError):
    """An enumeration would exceed the configured element budget."""


class Inconsistent(GenrepError):
    """A linear system has no solution.

    ``certificate`` optionally carries a combination of equations that
    reduces to ``0 = nonzero``.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class VerificationFailed(GenrepError):
    """A constructed object failed one of its defining checks."""


class NotSupported(GenrepError):
    """Operation unavailable for this coefficient ring."""


class NotNatural(GenrepError):
    """A family of maps fails naturality."""
