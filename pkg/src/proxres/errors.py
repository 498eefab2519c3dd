"""Exception types shared by all solver modules."""


class ProxresError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ProxresError, ValueError):
    """An input lies outside the documented validity range of an operation."""


class ConvergenceError(ProxresError, RuntimeError):
    """An iterative solver failed to converge.

    Carries the last iterate and the residual magnitude reached so callers
    can restart or report diagnostics.
    """

    def __init__(self, message, last_iterate=None, residual_magnitude=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual_magnitude = residual_magnitude


class NoSuchModeError(ProxresError, ValueError):
    """Fewer roots/levels exist than the requested index."""


class GeometryError(ProxresError, ValueError):
    """A resonator layout violates a geometric constraint (e.g. overlap)."""


class BoxError(ProxresError, ValueError):
    """A finite-difference box is too small for the requested state."""


class GainError(ProxresError, ValueError):
    """A complex energy with positive imaginary part was passed where only
    decaying (absorbing-medium) values are physical."""


class ConfigError(ProxresError, ValueError):
    """A run configuration file is missing, malformed, or inconsistent."""
