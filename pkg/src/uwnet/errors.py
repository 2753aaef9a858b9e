"""Exception types shared across the package."""


class UwnetError(Exception):
    """Base class for all package errors."""


class DimensionError(UwnetError):
    """Shapes or channel counts do not match what an operation requires."""


class ConfigError(UwnetError):
    """Invalid configuration value."""


class DomainError(UwnetError):
    """Input values outside the mathematical domain of an operation."""


class FormatError(UwnetError):
    """Malformed file contents (bad magic, truncation, bad field)."""


class DataIOError(UwnetError):
    """Missing or unreadable/unwritable files."""


class NumericError(UwnetError):
    """Non-finite values where finite ones are required."""


class StateError(UwnetError):
    """Stale or mismatched internal state (e.g. a cache from another forward pass)."""
