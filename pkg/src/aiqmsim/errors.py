"""Exception types shared across the package."""


class AiqmError(Exception):
    """Base class for all package errors."""


class InvalidSystemError(AiqmError, ValueError):
    """Raised for unphysical system parameters (e.g. zero particles)."""


class ContractViolationError(AiqmError, ValueError):
    """Raised when an operator or state violates its declared contract."""


class PropagationError(AiqmError, RuntimeError):
    """Raised when a propagation backend fails numerically."""


class PropagationDivergedError(PropagationError):
    """Raised when the propagated state drifts off the unit sphere."""


class ConditionViolatedError(AiqmError, ValueError):
    """Raised when an effective model is requested outside its validity condition.

    Carries the offending value (e.g. the actual Bessel coefficient) in
    ``actual`` so sweep drivers can report it.
    """

    def __init__(self, message, actual=None):
        super().__init__(message)
        self.actual = actual


class ScheduleError(AiqmError, ValueError):
    """Raised for drive schedules that do not tile the requested duration."""


class DegenerateOperatingPointError(AiqmError, ValueError):
    """Raised when the signal slope vanishes and no precision can be quoted."""


class SlopeCheckError(AiqmError, RuntimeError):
    """Raised when the finite-difference slope fails its half-step check."""


class DomainError(AiqmError, ValueError):
    """Raised for arguments outside the mathematical domain of an operation."""
