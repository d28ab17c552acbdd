"""Exception types raised by the package.

Every failure mode an operation documents gets its own class so callers can
catch precisely.  Errors that abort a computation mid-flight carry whatever
partial results are useful for diagnosis.
"""

from __future__ import annotations


class GsqgError(Exception):
    """Base class for all package errors."""


class ValidationError(GsqgError, ValueError):
    """Invalid argument or configuration value."""


class PositivityError(ValidationError):
    """A multiplier evaluated non-positive where positivity is required."""

    def __init__(self, r: float, value: float):
        self.r = float(r)
        self.value = float(value)
        super().__init__(
            f"multiplier is non-positive at r={r!r} (m={value!r}); "
            "positive symbols are required"
        )


class DerivativeUnavailableError(GsqgError):
    """Derivatives requested from a table-backed multiplier."""


class IndeterminateTailError(GsqgError):
    """Tail growth sits within classification tolerance of a boundary."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class QuadratureError(GsqgError):
    """Oscillatory quadrature failed to reach the requested tolerance.

    Carries the sequence of partial sums so the caller can inspect how far
    the accelerated series got.
    """

    def __init__(self, message: str, partial_sums=None, error_estimate=None):
        super().__init__(message)
        self.partial_sums = partial_sums
        self.error_estimate = error_estimate


class TableRangeError(GsqgError, ValueError):
    """Evaluation outside the tabulated radial range."""


class AccuracyError(GsqgError):
    """A build-time self-check failed; lists the offending probe points."""

    def __init__(self, message: str, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class ContactImminentError(GsqgError):
    """Inter-curve gap fell below the collision threshold.

    Not a malfunction: for the approach scenarios this is the expected end
    state.  Carries the last diagnostics snapshot.
    """

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class CflError(ValidationError):
    """Requested time step violates the advective stability bound."""

    def __init__(self, dt: float, dt_max: float):
        self.dt = float(dt)
        self.dt_max = float(dt_max)
        super().__init__(
            f"time step dt={dt:g} exceeds the stability bound {dt_max:g}; "
            f"use dt <= {dt_max:g}"
        )


class SelfIntersectionError(GsqgError):
    """A resampled curve crosses itself."""


class SingularEvaluationError(GsqgError, ZeroDivisionError):
    """Kernel evaluation at a coincident (or reflected-coincident) pair."""


class ProximityError(GsqgError):
    """Target point too close to a discretized curve for the node spacing."""


class DomainError(GsqgError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class NoCollisionError(GsqgError):
    """The approach-time integral diverges: no finite collision time."""

    def __init__(self, message: str, partial_value: float | None = None):
        super().__init__(message)
        self.partial_value = partial_value


class ToleranceUnattainableError(GsqgError):
    """Adaptive quadrature ran out of budget; carries the best estimate."""

    def __init__(self, message: str, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
