"""Exception taxonomy shared by the whole package.

Every exception carries an ``exit_code`` that the command-line front end maps
to its documented process exit status:

* 2: input could not be parsed,
* 3: a precondition on the requested operation was violated,
* 4: a numeric failure (no convergence, horizon exhausted, overflow, a
  pullback hit the singular value, ...),
* 5: I/O failure (mapped from OSError, no class here).
"""

from __future__ import annotations


class ExprayError(Exception):
    exit_code = 4


class ParseError(ExprayError):
    exit_code = 2


class PreconditionError(ExprayError):
    exit_code = 3


class NumericError(ExprayError):
    exit_code = 4


# -- symbol sequences ---------------------------------------------------------

class HorizonExceeded(NumericError):
    """An entry (or its magnitude) falls outside the representable range."""


class IndeterminateComparison(NumericError):
    """Streams agree up to the horizon but equality cannot be certified."""


# -- model dynamics -----------------------------------------------------------

class Overflow(NumericError):
    """A potential left the floating point exponent range."""


class Indeterminate(NumericError):
    """The requested verdict could not be certified within the horizon."""

    def __init__(self, message: str = "", horizon: int | None = None):
        super().__init__(message or "not certifiable within the horizon")
        self.horizon = horizon


class NotExponentiallyBounded(PreconditionError):
    """Unreachable within the built-in tail rules; kept for completeness."""


class SpeedSpecInvalid(PreconditionError):
    """The target escape-speed sequence fails the growth conditions."""


class PreconditionSlowAddress(PreconditionError):
    """The operation requires an address with an escaping endpoint."""


# -- ray construction ---------------------------------------------------------

class NotInY(PreconditionError):
    """The model point is (certifiably) outside the validity region."""


class NotInX(PreconditionError):
    """The model point is not escaping (a forward potential went negative)."""


class BranchCutHit(NumericError):
    """A pullback argument landed on the logarithm's branch cut."""


class BrokenRay(NumericError):
    """A pullback passed through the singular value; the ray is truncated."""

    def __init__(self, depth: int, potential: float):
        super().__init__(
            f"pullback at depth {depth} passes within the broken-ray band "
            f"of the singular value (potential {potential!r})"
        )
        self.depth = depth
        self.potential = potential


class SlowEndpoint(PreconditionError):
    """The endpoint of a slow address is not an escaping point."""


# -- inversion / conjugation --------------------------------------------------

class LeftHalfplaneViolation(PreconditionError):
    def __init__(self, step: int):
        super().__init__(f"orbit point {step} left the validity halfplane")
        self.step = step


class StripBoundary(NumericError):
    def __init__(self, step: int):
        super().__init__(f"orbit point {step} is too close to a strip boundary")
        self.step = step


class NotConverged(NumericError):
    """The recovered potential could not be certified to tolerance."""


class NotInA(PreconditionError):
    """The point's orbit leaves the conjugation domain."""


# -- combinatorics ------------------------------------------------------------

class OnBoundary(PreconditionError):
    def __init__(self, k: int):
        super().__init__(f"shifted address {k} equals a partition boundary")
        self.k = k


# -- parameter space ----------------------------------------------------------

class NoConvergence(NumericError):
    def __init__(self, iterations: int, best_residual: float):
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(best residual {best_residual!r})"
        )
        self.iterations = iterations
        self.best_residual = best_residual


class PotentialTooLow(PreconditionError):
    """The requested potential does not exceed the ray's starting potential."""


class DomainLost(NumericError):
    """An iterate left the region where the defining equation is valid."""


class HypothesisViolated(PreconditionError):
    """The explicit bound's hypothesis fails for the given arguments."""
