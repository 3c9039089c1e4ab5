"""Exception types shared across the package."""


class GendermixError(Exception):
    """Base class for every error raised by this package."""


class InputError(GendermixError):
    """Malformed input data, out-of-range parameter, or violated contract."""


class EstimationError(GendermixError):
    """Estimation is impossible with the given data (no usable names)."""


class SkippedRecord(GendermixError):
    """Signal that a single record cannot be normalized and must be skipped.

    Raised by ``normalize_name``; ingestion loops catch it, emit a notice
    and continue. It is never fatal on its own.
    """
