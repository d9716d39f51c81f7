"""Exception hierarchy for the liketraits package.

Everything raised on purpose derives from :class:`LikeTraitsError`, so callers
(and the CLI exit-code mapping) can distinguish data problems from bugs.
"""


class LikeTraitsError(Exception):
    """Base class for all errors raised by this package."""


# --- score / type validation ------------------------------------------------

class NonFiniteError(LikeTraitsError):
    """A trait score is NaN or infinite."""


class OutOfRangeError(LikeTraitsError):
    """A trait score lies outside the [1, 5] scale."""


# --- parsing and ingest -----------------------------------------------------

class MalformedRowError(LikeTraitsError):
    """A CSV row has the wrong shape. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DuplicateUserError(LikeTraitsError):
    """The same user id appears twice where uniqueness is required."""


class DuplicateLikeIdError(LikeTraitsError):
    """A like id maps to more than one category in a fixture table."""


class TransportError(LikeTraitsError):
    """Remote category lookup failed after all retries."""


# --- features ---------------------------------------------------------------

class EmptyDatasetError(LikeTraitsError):
    """An operation that needs at least one user got none."""


class ZeroTotalError(LikeTraitsError):
    """Cannot normalize a user with zero likes."""


class UnknownCategoryError(LikeTraitsError):
    """A count key does not exist in the feature space."""


# --- sampling ---------------------------------------------------------------

class TooFewRowsError(LikeTraitsError):
    """Splitting needs at least two rows."""


class InsufficientRowsError(LikeTraitsError):
    """A fixed-size training draw does not fit in the available rows."""


# --- models -----------------------------------------------------------------

class DegenerateInputError(LikeTraitsError):
    """Model fitting got an empty training set."""


class KTooLargeError(LikeTraitsError):
    """k exceeds the number of stored neighbor rows."""


class DimensionMismatchError(LikeTraitsError):
    """Feature vector width does not match the model."""


class UnsupportedVersionError(LikeTraitsError):
    """Model document declares a format version we cannot read."""


class CorruptDocumentError(LikeTraitsError):
    """Model document is not valid JSON or misses required fields."""


# --- evaluation -------------------------------------------------------------

class LengthMismatchError(LikeTraitsError):
    """Predicted and actual value lists differ in length."""


class EmptyInputError(LikeTraitsError):
    """Metrics require at least one (predicted, actual) pair."""


class LabelOutOfRangeError(LikeTraitsError):
    """A class label falls outside [0, n_classes)."""


class FeatureSpaceMismatchError(LikeTraitsError):
    """Model and evaluation matrix were built over different feature spaces."""


# --- experiments / configuration ---------------------------------------------

class InvalidSpecError(LikeTraitsError):
    """A synthetic-data spec has invalid field values."""


class ConfigError(LikeTraitsError):
    """An experiment config document violates the expected schema."""
