"""Exception types shared across the package."""


class BifilterError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(BifilterError):
    """Invalid configuration: bad thresholds, unknown comparators, bad flags."""


class DataError(BifilterError):
    """Invalid or inconsistent input data: I/O failures, encoding problems,
    length mismatches, malformed dictionary or label files."""
