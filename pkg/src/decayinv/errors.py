"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid argument combination (bad weight parameters, window mismatch, ...)."""


class ConfigError(ParameterError):
    """Invalid experiment configuration; maps to CLI exit code 2."""


class SingularityError(ArithmeticError):
    """Truncated matrix is numerically singular.

    Carries the reciprocal condition estimate that triggered the failure.
    """

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class NumericalError(RuntimeError):
    """An iteration or scan failed to converge within its cap."""


class RangeError(OverflowError):
    """A value exceeds float range; the natural log is available instead."""

    def __init__(self, message, log_value=None):
        super().__init__(message)
        self.log_value = log_value
