"""Exception types shared across the package.

CLI exit codes: ConfigError and DomainError map to exit code 2,
ResourceLimitError to exit code 3.
"""


class FriabilisError(Exception):
    """Base class for package-specific errors."""


class ConfigError(FriabilisError, ValueError):
    """A run configuration failed validation."""


class DomainError(FriabilisError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceLimitError(FriabilisError, RuntimeError):
    """A computation would exceed a configured ceiling (sieve size,
    enumeration count, table size, ...)."""


class ConvergenceError(FriabilisError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""
