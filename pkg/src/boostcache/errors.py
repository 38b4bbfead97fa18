"""Exception types shared across the package."""


class BoostError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidVector(BoostError):
    """Vector input is unusable: zero norm, non-finite entries, or a broken invariant."""


class DimError(BoostError):
    """Dimension mismatch between embeddings, banks, or aligned arrays."""


class ConfigError(BoostError):
    """A parameter is outside its documented range or a combination is unsupported."""


class LabelError(BoostError):
    """Class label outside [0, N)."""


class EmptyCache(BoostError):
    """Operation requires at least one cache entry."""


class EmptyStream(BoostError):
    """Stream evaluation requires at least one record."""


class FormatError(BoostError):
    """File content violates the expected binary or JSON layout."""


class TruncationError(FormatError):
    """Stream file ends mid-record; carries the index of the offending record."""

    def __init__(self, record_index: int, message: str = ""):
        self.record_index = record_index
        detail = message or "file truncated"
        super().__init__(f"record {record_index}: {detail}")


class VersionError(FormatError):
    """Stream file declares an unsupported format version."""


class IoError(BoostError):
    """Filesystem failure while reading or writing an artifact."""


class DivergenceError(BoostError):
    """Optimization produced a non-finite loss."""
