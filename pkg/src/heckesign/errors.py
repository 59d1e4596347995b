class PreconditionError(ValueError):
    """An argument is outside the operation's documented domain."""


class DomainError(ValueError):
    """The request is well-formed but mathematically undefined for this operation."""


class NumericalFailure(ArithmeticError):
    """A numerical routine did not reach its target accuracy."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class DegenerateSpectrumError(NumericalFailure):
    """T_2 has eigenvalues too close to separate numerically."""
