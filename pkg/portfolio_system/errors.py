"""
Exception hierarchy for the portfolio constructor.

Each family carries the exit code the command-line entry point reports:
input problems exit with 1, numerical failures with 2 and invalid option
combinations with 3.
"""
from typing import Optional


class PortfolioError(Exception):
    """Base class for every error raised by the portfolio constructor."""
    exit_code = 2


# Input errors (exit 1)

class InputError(PortfolioError, ValueError):
    """Malformed or invalid input data."""
    exit_code = 1


class EmptyInput(InputError):
    """The input holds no data rows."""


class NonNumericCell(InputError):
    """A price cell could not be parsed as a number."""

    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"non-numeric value {value!r} at row {row}, column {column!r}")


class NonPositivePrice(InputError):
    """A price is zero, negative or not finite."""

    def __init__(self, row: int, column: str, value: float):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"price must be positive and finite, got {value!r} at row {row}, column {column!r}")


class RaggedRows(InputError):
    """A row has a different number of cells than the header."""

    def __init__(self, row: int, expected: int, found: int):
        self.row = row
        self.expected = expected
        self.found = found
        super().__init__(f"row {row} has {found} cells, expected {expected}")


class DuplicateAssetName(InputError):
    """Two assets share a name, or a name is empty."""


class TooFewRows(InputError):
    """Fewer than three price rows."""


class DimensionMismatch(InputError):
    """Vector and matrix sizes disagree."""


class AsymmetricCovariance(InputError):
    """Covariance matrix asymmetric beyond tolerance."""


class NegativeVariance(InputError):
    """A diagonal covariance entry is negative."""


class MalformedDocument(InputError):
    """The parameter document is not valid or lacks required fields."""


class TooFewObservations(InputError):
    """Fewer than two return observations."""


class TooFewAssets(InputError):
    """The operation needs at least two assets."""


class WrongDimension(InputError):
    """The operation only supports a specific number of assets."""


# Numerical errors (exit 2)

class NumericalError(PortfolioError, ArithmeticError):
    """A numerical failure while solving or evaluating a portfolio."""
    exit_code = 2


class SingularSystem(NumericalError):
    """The constraint system (|E| or |K|) or the covariance is singular."""

    def __init__(self, message: str, condition_estimate: Optional[float] = None):
        self.condition_estimate = condition_estimate
        if condition_estimate is not None:
            message = f"{message} (condition estimate {condition_estimate:.6g})"
        super().__init__(message)


class DegenerateNormalization(NumericalError):
    """The MRAR normalization 1'inv(Omega)r is numerically zero."""


class NegativePortfolioVariance(NumericalError):
    """w'Omega w is negative beyond rounding, so Omega is not PSD."""


class AllSubsetsSingular(NumericalError):
    """Every enumerated subset failed under every requested method."""


# Configuration errors (exit 3)

class ConfigError(PortfolioError):
    """Invalid option or flag combination."""
    exit_code = 3


class EnumerationCapExceeded(ConfigError):
    """Asset count above the enumeration cap without an override."""


class EnumerationOverflow(ConfigError):
    """Asset count too large for the portfolio count to be represented."""
