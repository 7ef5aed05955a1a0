"""
Exception types raised by adawin.

Plain argument-range problems raise ``ValueError`` directly; the classes
below mark the failures callers usually want to tell apart.
"""


class AdawinError(Exception):
    """Base class for all adawin errors."""


class DimensionError(AdawinError, ValueError):
    """Operand sizes do not agree (matrix/vector shape contract)."""


class ConfigError(AdawinError, ValueError):
    """A run configuration or serialized document failed validation."""


class DecodingError(AdawinError, RuntimeError):
    """The decoding problem itself is malformed (not a logical failure)."""
