"""Exception types shared across the package."""


class CVQKDError(Exception):
    """Base class for all package errors."""


class DomainError(CVQKDError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class PhysicalityError(CVQKDError):
    """A covariance matrix violates the uncertainty bound (symplectic eigenvalue < 1).

    Carries the offending eigenvalue in ``value``.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class DegenerateMeasurementError(CVQKDError):
    """Conditioning on a variable with non-positive or singular variance."""


class UnsupportedModelError(CVQKDError):
    """The requested parameters lie outside the validity domain of a model."""


class NonConvergedError(CVQKDError):
    """The T -> 1 purification limit did not converge to tolerance.

    Carries both key-rate evaluations in ``k_at_t`` / ``k_at_t_check``.
    """

    def __init__(self, message, k_at_t=None, k_at_t_check=None):
        super().__init__(message)
        self.k_at_t = k_at_t
        self.k_at_t_check = k_at_t_check


class OptimizerAmbiguityError(CVQKDError):
    """The coarse pre-scan found more than one interior local optimum.

    Carries the scan grid and values in ``scan``.
    """

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan


class MonotonicityError(CVQKDError):
    """A quantity assumed monotone for bisection failed its pre-scan."""


class ConfigError(CVQKDError, ValueError):
    """A run-configuration document failed schema validation."""
