"""Exception types shared across the package."""


class JacobiSpectraError(Exception):
    """Base class for all package errors."""


class ValidationError(JacobiSpectraError, ValueError):
    """Input data violates a documented invariant."""


class PoleProximityError(JacobiSpectraError, ValueError):
    """Evaluation requested too close to a Weyl pole or a band edge."""


class ConvergenceError(JacobiSpectraError, ArithmeticError):
    """An iteration stopped before reaching its tolerance.

    The partially converged object, when there is one, is kept on
    ``self.partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ContourError(JacobiSpectraError, ArithmeticError):
    """Argument-principle evaluation failed on the requested contour."""
