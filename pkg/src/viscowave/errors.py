"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class GuardError(RuntimeError):
    """A numerical resolution guard was violated (grid too coarse)."""
