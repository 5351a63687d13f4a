"""Toolkit-specific exception types."""


class WavFormatError(ValueError):
    """Raised when a WAV file uses an unsupported codec, layout or channel count."""


class DegenerateReferenceError(ValueError):
    """Raised when a projection-based metric receives a zero-energy signal."""


class NoInactivityError(ValueError):
    """Raised when a dialog-activity mask leaves no block to measure."""


class CannotNormalizeError(ValueError):
    """Raised when loudness normalization is requested for an immeasurable clip."""


class ConfigurationError(ValueError):
    """Raised when a session or run configuration is inconsistent."""
