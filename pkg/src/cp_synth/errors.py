"""Exception types raised across the package."""


class CompositePulseError(Exception):
    """Base class for all package errors."""


class InvalidPulseError(CompositePulseError, ValueError):
    pass


class InvalidArgumentError(CompositePulseError, ValueError):
    pass


class DomainError(CompositePulseError, ValueError):
    """A probability or similar parameter is outside its allowed range."""


class UnsupportedLengthError(CompositePulseError, ValueError):
    pass


class UnsupportedOrderError(CompositePulseError, ValueError):
    pass


class DimensionError(CompositePulseError, ValueError):
    pass


class MetricUndefinedError(CompositePulseError, ValueError):
    """A profile metric does not apply to the given sequence."""


class NoCrossingError(MetricUndefinedError):
    pass


class NotSuppressedError(MetricUndefinedError):
    pass


class SchemaError(CompositePulseError, ValueError):
    """A JSON resource or input file does not follow its schema."""


class ConvergenceError(CompositePulseError, RuntimeError):
    """No accepted solution was found within the multi-start budget."""

    def __init__(self, message, best_residual=float("inf")):
        super().__init__(message)
        self.best_residual = best_residual
