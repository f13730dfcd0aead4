class LSCError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LSCError, ValueError):
    """Input outside the physical domain of an operation."""


class ConfigError(LSCError, ValueError):
    """Malformed or invalid scenario configuration."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        super().__init__(message)
