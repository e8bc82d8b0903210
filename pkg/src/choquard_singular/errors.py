"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when a parameter tuple violates one or more baseline bounds.

    ``violations`` lists every failed bound, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid parameters: " + "; ".join(self.violations))


class PreconditionError(ValueError):
    pass


class DomainError(ValueError):
    pass


class EmptyRangeError(RuntimeError):
    """The admissible gamma interval came out empty for an existence YES."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical routine (CLI exit code 3)."""


class ToleranceNotMet(NumericalError):
    pass


class NotIntegrable(NumericalError):
    pass


class SingularGradient(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


class NoBracket(NumericalError):
    pass


class MaxIterations(NumericalError):
    pass


class MonotonicityViolation(NumericalError):
    pass


class WindowTooShort(ValueError):
    pass


class NegativeLHS(NumericalError):
    pass


class CriticalThetaOneWarning(UserWarning):
    """theta = 1 at a + b = N: the two-sided envelope is not available."""
