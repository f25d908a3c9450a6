"""Exception hierarchy shared by every module of the package."""


class SSDError(Exception):
    """Base class for all package errors."""


class DomainError(SSDError, ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedMomentError(DomainError):
    """A requested moment does not exist for the given parameters."""


class InvalidHyperparameterError(DomainError):
    """Gamma mixture hyperparameters violate a required constraint."""


class QuadratureError(SSDError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, value=float("nan"), error_estimate=float("inf")):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class ConfigError(SSDError, ValueError):
    """A design configuration failed validation."""
