"""Exception types shared across the package.

The CLI maps these onto process exit codes: usage problems exit with 2,
data problems with 3, and numeric problems with 4.
"""


class ProtosumError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ProtosumError):
    """Invalid configuration or argument combination."""

    exit_code = 2


class DataError(ProtosumError):
    """Malformed, inconsistent, or missing input data."""

    exit_code = 3


class NumericError(ProtosumError):
    """Numerically undefined operation (zero-norm cosine, NaN input)."""

    exit_code = 4
