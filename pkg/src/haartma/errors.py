class DomainError(ValueError):
    """Raised when an input lies outside an operation's mathematical domain."""


class ConfigError(ValueError):
    """Raised for invalid run configuration (unknown key, bad value)."""
