"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands live in different coordinate dimensions."""


class NotUnitNorm(ValueError):
    """A direction argument was required to have unit norm; normalize explicitly."""


class SingularSystem(ValueError):
    """The two-by-two block system is singular (multiplier inside the guard band of +-1)."""


class DomainError(ValueError):
    """Input outside an operation's domain (non-finite coordinates, angles out of range)."""


class CaseError(ValueError):
    """Operation invoked on an input whose case classification does not admit it."""


class DivergenceError(RuntimeError):
    """A solver iterate became non-finite.  Carries the partial trace, when available."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
