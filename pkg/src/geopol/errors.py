"""Exception hierarchy shared across the package."""


class GeopolError(Exception):
    """Base class for all errors raised by geopol."""


class ConfigError(GeopolError):
    """Malformed scenario file or invalid CLI/library configuration."""


class ChartExitError(GeopolError):
    """A flow left the coordinate patch of its model metric."""


class AnalyticityDomainError(GeopolError):
    """Evaluation requested outside the declared analyticity domain."""


class IntegrationError(GeopolError):
    """The adaptive integrator failed (step size underflow)."""


class OverflowGuardError(GeopolError):
    """Solution entries exceeded the overflow guard during integration."""


class PoleOnPathError(GeopolError):
    """The Jacobi value matrix becomes singular on (or next to) the
    continuation path.

    Carries the :class:`~geopol.jacobi.PoleReport` as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SingularEndpointError(GeopolError):
    """The Jacobi value matrix is singular at the continuation endpoint.

    ``condition`` holds the reciprocal condition estimate of Y(end).
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DegeneratePolarizationError(GeopolError):
    """Im(phi) is too ill-conditioned to define a complex structure."""


class NoTransporterError(GeopolError):
    """No affine map carries the source parameter to the target one."""


class NotInvertibleError(GeopolError):
    """Inversion requested for a group element with zero dilation part."""


class BasePointMismatchError(GeopolError):
    """Tangent vectors attached to different geodesics were combined."""
