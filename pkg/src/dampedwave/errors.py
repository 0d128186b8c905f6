"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or argument combination."""


class NumericalError(RuntimeError):
    """A computation produced non-finite or otherwise unusable values."""
