"""Exception hierarchy shared by all modules."""


class SpecError(ValueError):
    """Problem data that no solver path can accept."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function (e.g. t <= 0)."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy value."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class QuadratureError(NumericError):
    """Adaptive quadrature exhausted its subdivision budget."""


class InversionError(NumericError):
    """Numerical Laplace inversion produced a non-finite result."""


class ConditioningError(NumericError):
    """The Laplace-domain boundary system is numerically singular."""
