"""Exception types shared across the toolkit."""


class RareclassError(Exception):
    """Base class for all toolkit errors."""


class DataError(RareclassError):
    """A file or record violates one of the documented data formats."""


class ConfigError(RareclassError):
    """A configuration file, key, or override value is invalid."""
