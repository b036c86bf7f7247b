"""Error taxonomy shared across the package.

Kept deliberately small: configuration/validation problems, geometry
problems (shapes that do not fit the domain), and data problems (wrong
shapes, non-finite entries).  Everything derives from ValueError so casual
callers can catch broadly.
"""

__all__ = ["ConfigError", "GeometryError", "DataError"]


class ConfigError(ValueError):
    """Invalid configuration value or structure."""


class GeometryError(ValueError):
    """Requested geometric object does not fit inside the domain."""


class DataError(ValueError):
    """Malformed numerical data: shape mismatch or non-finite entries."""
