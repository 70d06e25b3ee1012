"""Exception hierarchy shared across the package."""


class DiffestError(Exception):
    """Base class for all package errors."""


class DegenerateRegimeError(DiffestError, ValueError):
    """The requested parameter point sits on a singular corner of a bound."""


class PureStateSingularError(DegenerateRegimeError):
    """The covariance is (numerically) pure, so the QFI linear system is singular."""


class UninformativeMeasurementError(DegenerateRegimeError):
    """The measured quadrature carries no information about the diffusion rate."""


class IllConditionedError(DiffestError, ArithmeticError):
    """A linear solve was too ill-conditioned to trust.

    The condition estimate is kept on ``condition`` for diagnostics.
    """

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class ConfigError(DiffestError, ValueError):
    """Invalid user configuration (units, ranges, missing fields)."""


class SingularCovarianceError(DiffestError, ValueError):
    """A covariance that must be positive definite is not."""
