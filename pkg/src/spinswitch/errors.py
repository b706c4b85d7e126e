"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a configuration, schedule, or lattice description is invalid."""


class UnsupportedConfigurationError(ConfigurationError):
    """Raised when a closed-form result is requested for a lattice shape it does not cover."""


class DomainError(ValueError):
    """Raised when a numerical routine is evaluated outside its supported domain."""


class NumericalFailureError(RuntimeError):
    """Raised when an integration or propagator check detects a numerical breakdown."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class FrontNotCapturedError(RuntimeError):
    """Raised when a wave-front fit is attempted on a trajectory that ends too early."""
