"""Exception types shared across the package.

Input-side errors (bad shapes, malformed files) and numerical failures are
kept in separate families so the CLI can map them to distinct exit codes.
"""


class TvnetError(Exception):
    """Base class for all package-specific errors."""


class ShapeMismatch(TvnetError, ValueError):
    """Input arrays disagree in shape where they must match."""


class DimensionMismatch(TvnetError, ValueError):
    """A vector or matrix has the wrong length for the requested operation."""


class InvalidPair(TvnetError, ValueError):
    """Variable pair (i, j) violates 1 <= i < j <= p."""


class DegenerateColumn(TvnetError, ValueError):
    """A data column is constant; its variance-based precision is undefined."""


class InvalidKnots(TvnetError, ValueError):
    """B-spline evaluation points or basis count are unusable."""


class DegenerateMask(TvnetError, ValueError):
    """A label mask has no positives or no negatives."""


class PanelFormatError(TvnetError, ValueError):
    """A panel CSV or report JSON does not match the documented schema."""


class SingularBlock(TvnetError, ArithmeticError):
    """A pivot block in the block-tridiagonal elimination is numerically singular."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"singular pivot block at position {index}")


class Singular(TvnetError, ArithmeticError):
    """A symmetric system is rank deficient beyond ridge repair."""


class NotPositiveDefinite(TvnetError, ArithmeticError):
    """A matrix required to be positive definite is not."""


class ConstructionFailed(TvnetError, RuntimeError):
    """A randomized scenario construction did not satisfy its constraints."""


class AllCellsFailed(TvnetError, RuntimeError):
    """Every cell of a tuning grid failed to produce a finite criterion."""


# Families used by the CLI exit-code contract (2 = input error, 3 = numerical).
INPUT_ERRORS = (
    ShapeMismatch,
    DimensionMismatch,
    InvalidPair,
    DegenerateColumn,
    InvalidKnots,
    DegenerateMask,
    PanelFormatError,
)
NUMERICAL_ERRORS = (
    SingularBlock,
    Singular,
    NotPositiveDefinite,
    ConstructionFailed,
    AllCellsFailed,
)
