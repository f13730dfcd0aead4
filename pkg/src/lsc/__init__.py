"""Microscopic model of molecular spectral converters in luminescent solar concentrators."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, LSCError

__all__ = ["ConfigError", "DomainError", "LSCError", "__version__"]
