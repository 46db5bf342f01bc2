"""Exception types shared across the package."""


class AwtError(Exception):
    """Base class for package errors."""


class DomainError(AwtError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(AwtError, ValueError):
    """A user-supplied object (tabulation, file, config) failed validation."""


class UnsupportedError(AwtError, NotImplementedError):
    """The request is well formed but not supported (order, dimension, measure)."""


class NumericError(AwtError, ArithmeticError):
    """A numerical procedure failed to reach its accuracy target.

    Parameters
    ----------
    message : str
    achieved : float, optional
        Best error estimate reached before giving up.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DegenerateError(AwtError, ValueError):
    """A covariance or scale configuration is singular."""


class InapplicableBoundError(AwtError, ValueError):
    """A bound is requested at a point where it carries no information."""
