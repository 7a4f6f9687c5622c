"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class NumericalError(RuntimeError):
    """A numerical step failed: non-convergence, ill-conditioning, large residual."""


class ConvergenceWarning(RuntimeWarning):
    """A quadrature or iteration did not meet its convergence monitor."""
