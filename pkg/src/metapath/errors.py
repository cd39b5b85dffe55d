"""Exception hierarchy.

Every error raised by the library derives from :class:`MetapathError`.
``ComputationError`` covers numerical / statistical failures (CLI exit 1),
``InputError`` covers malformed files and bad configuration (CLI exit 2).
"""


class MetapathError(Exception):
    """Base class for all library errors."""


class ComputationError(MetapathError):
    pass


class InputError(MetapathError):
    pass


# --- dataset -----------------------------------------------------------------

class MissingColumn(InputError):
    def __init__(self, column):
        super().__init__(f"header lacks required column {column!r}")
        self.column = column


class BadNumeral(InputError):
    def __init__(self, row, column, text):
        super().__init__(f"row {row}, column {column!r}: cannot parse {text!r} as a number")
        self.row = row
        self.column = column
        self.text = text


class RaggedRow(InputError):
    def __init__(self, row, expected, got):
        super().__init__(f"row {row}: expected {expected} cells, found {got}")
        self.row = row
        self.expected = expected
        self.got = got


class UnknownColumn(ComputationError):
    def __init__(self, column):
        super().__init__(f"unknown column {column!r}")
        self.column = column


class EmptyGroup(ComputationError):
    pass


class DegenerateGroup(ComputationError):
    def __init__(self, column, outcome):
        super().__init__(
            f"column {column!r}: outcome group {outcome} has no non-zero cells to take a median of"
        )
        self.column = column
        self.outcome = outcome


class NonBinary(ComputationError):
    pass


# --- numerics ------------------------------------------------------------------

class DomainError(ComputationError, ValueError):
    pass


class NoConvergence(ComputationError):
    pass


class TooFewSamples(ComputationError):
    pass


class ZeroVariance(ComputationError):
    pass


class ZeroVarianceColumn(ComputationError):
    def __init__(self, column):
        super().__init__(f"column {column!r} has zero variance")
        self.column = column


class NotSymmetric(ComputationError):
    pass


class BadComponentCount(ComputationError):
    pass


class SingleClass(ComputationError):
    pass


class Separation(ComputationError):
    """Raised when a coefficient diverges during IRLS (complete or quasi-separation)."""

    def __init__(self, feature, value):
        super().__init__(
            f"coefficient for {feature!r} diverged to {value:.3g}; the data look (quasi-)separable"
        )
        self.feature = feature
        self.value = value


class ShapeMismatch(ComputationError):
    pass


# --- evaluation ----------------------------------------------------------------

class DegenerateSplit(ComputationError):
    pass


class LengthMismatch(ComputationError):
    pass


class EmptyMatrix(ComputationError):
    pass


# --- enrichment ----------------------------------------------------------------

class UnmappedPredictor(InputError):
    def __init__(self, predictor):
        super().__init__(f"predictor {predictor!r} has no entry in the mapping")
        self.predictor = predictor


class EmptyQuery(ComputationError):
    pass


class InconsistentBackground(InputError):
    pass


class MalformedLine(InputError):
    def __init__(self, line, text=""):
        super().__init__(f"line {line}: expected two tab-separated fields, got {text!r}")
        self.line = line


class OfflineError(InputError):
    pass
