"""Exception types shared across the package.

Configuration-type errors derive from ``ValueError`` so that callers doing
plain input validation keep working; numerical failures derive from
``RuntimeError``.
"""


class DimensionError(ValueError):
    """Matrix/vector shapes or dimensions are inconsistent."""


class RepresentationError(ValueError):
    """Operation received states in mismatched or unsupported representations."""


class NormalizationError(ValueError):
    """A state violates its normalization invariant."""


class ConfigError(ValueError):
    """Invalid run configuration (parameters out of range, missing inputs)."""


class ResolutionError(ConfigError):
    """Time grid too coarse for the requested carrier frequency."""

    def __init__(self, message, required_steps=None):
        super().__init__(message)
        self.required_steps = required_steps


class CalibrationError(RuntimeError):
    """A pulse calibration search failed to reach its target transfer."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or produced invalid values."""
