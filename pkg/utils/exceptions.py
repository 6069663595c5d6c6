"""
Exception hierarchy shared by the algebra, radial, geometry and verification packages
"""
from typing import Optional


class KahlerEinsteinError(Exception):
    """Base class for every error raised by this project"""


class InvalidSpecError(KahlerEinsteinError, ValueError):
    """Eigenvalue specification violates n >= 1, k >= 1, len == n or lambda < 1"""


class InvalidDegreeError(KahlerEinsteinError, ValueError):
    """Requested degree is below the polynomial's degree"""


class FactorizationError(KahlerEinsteinError):
    """Synthetic division left a remainder above tolerance"""


class ConsistencyError(KahlerEinsteinError):
    """Two criteria that must agree disagreed beyond tolerance"""


class PreconditionError(KahlerEinsteinError, ValueError):
    """Operation called outside the case it is defined for"""


class NearSingularError(KahlerEinsteinError):
    """Denominator of the W right-hand side is numerically zero"""


class ProfileSolverError(KahlerEinsteinError):
    """Backward integration failed or a postcondition did not hold"""

    def __init__(self, message: str, last_r: Optional[float] = None, last_w: Optional[float] = None):
        self.last_r = last_r
        self.last_w = last_w
        if last_r is not None:
            message = f"{message} (last r={last_r:.17g}, W={last_w:.17g})"
        super().__init__(message)


class DomainError(KahlerEinsteinError, ValueError):
    """Argument lies outside the function's domain"""


class SignViolationError(KahlerEinsteinError):
    """Radicand of the phi formula is not positive"""


class ProfileOverflowError(KahlerEinsteinError, OverflowError):
    """Y = 1/Z requested where Z is numerically zero"""


class EvaluationError(KahlerEinsteinError):
    """Finite-difference sample produced NaN or Inf"""


class MetricError(KahlerEinsteinError):
    """Hermitian metric is not positive definite"""


class NotNegativeBundleError(MetricError):
    """Induced base metric -Ric(E) is not positive definite"""


class CompositionError(KahlerEinsteinError, ValueError):
    """Metrics cannot be combined (dimension or domain mismatch)"""


class FiberSingularityError(DomainError):
    """Fiber block formula evaluated at xi = 0"""


class UnsupportedModelError(KahlerEinsteinError):
    """Model or parameter combination is not supported by the operation"""
