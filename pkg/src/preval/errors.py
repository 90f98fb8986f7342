"""Exception hierarchy shared across the package.

The three leaf categories map onto CLI exit codes and service error kinds:
bad arguments (2), data problems (3), numeric failures (4).
"""


class PrevalError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"


class ParameterError(PrevalError, ValueError):
    """Invalid argument or configuration (bad grid, non-positive lambda, ...)."""

    kind = "args"


class DataError(PrevalError):
    """Problem with input data: files, schemas, labels, shapes."""

    kind = "data"


class DimensionError(DataError):
    """Array shapes do not line up."""


class NumericError(PrevalError):
    """Numeric failure: non-finite values, singular or degenerate systems."""

    kind = "numeric"
