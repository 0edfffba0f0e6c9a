"""Dynamic rays: the contraction construction of escaping points.

For a parameter kappa, points of the escaping set with address s and potential
t are produced by iterating the model forward until the potential clears a
seeding cap, planting the asymptotic value there, and pulling back through the
inverse branches

    L_k(w) = Log(w - kappa) + 2*pi*i*k

along the address.  Each pullback inside the validity region contracts errors
by at least one half, so a seed planted at potential T carries a certified
a-posteriori bound exp(-T)*(2K + 2*pi + 4) * 2**(-depth).

Below the validity region the construction extends by extra pullbacks along
the ray; there the per-level contraction factor 1/|w - kappa| is tracked
honestly, and an intermediate value inside the broken-ray band around kappa
truncates the ray (BrokenRay).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from . import model
from .address import TWO_PI, ExternalAddress
from .errors import (
    BranchCutHit,
    BrokenRay,
    HorizonExceeded,
    Indeterminate,
    NotInX,
    NotInY,
    Overflow,
    SlowEndpoint,
)
from .model import AddressClass, ModelPoint, Q_threshold, classify, t_s

# Seeds may be planted early (entries exhausted) once the potential clears
# this floor; the reported error bound absorbs it.
_SEED_FLOOR = 30.0
# Above this potential the asymptotic seed t + 2*pi*i*s1 and the one-pullback
# seed agree to double precision, and F would overflow anyway.
_PLAIN_SEED_T = 700.0


@dataclass(frozen=True)
class RayContext:
    """Parameter plus the constants of the construction.

    K must dominate |kappa| and exceed 2*pi + 6; Q = Q_threshold(K) is the
    potential floor of the validity region.  t_max is the seeding cap, tol the
    target accuracy of returned points.
    """

    kappa: complex
    K: float = None  # type: ignore[assignment]
    t_max: float = 50.0
    tol: float = 1e-9
    depth_cap: int = 64
    broken_band: float = 1e-8
    Q: float = field(init=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        k = self.K
        if k is None:
            k = max(abs(self.kappa), TWO_PI + 6.0) + 1.0
        k = float(k)
        if not k > TWO_PI + 6.0:
            raise ValueError("K must exceed 2*pi + 6")
        if k < abs(self.kappa):
            raise ValueError("K must dominate |kappa|")
        if not (0.0 < self.tol):
            raise ValueError("tol must be positive")
        if not (0.0 < self.t_max <= _PLAIN_SEED_T):
            raise ValueError("t_max must lie in (0, 700]")
        object.__setattr__(self, "kappa", complex(self.kappa))
        object.__setattr__(self, "K", k)
        object.__setattr__(self, "Q", Q_threshold(k))

    @property
    def seed_constant(self) -> float:
        return 2.0 * self.K + TWO_PI + 4.0


@dataclass(frozen=True)
class RayPointResult:
    point: complex
    error_bound: float
    depth: int


@dataclass(frozen=True)
class RaySample:
    address: ExternalAddress
    samples: tuple[tuple[float, complex, float], ...]  # (potential, point, bound)
    broken: bool
    endpoint_included: bool
    broken_below: float | None = None  # largest severed potential seen


def E(ctx_or_kappa, z: complex) -> complex:
    """One application of the exponential map z -> exp(z) + kappa."""
    kappa = ctx_or_kappa.kappa if isinstance(ctx_or_kappa, RayContext) else ctx_or_kappa
    if z.real > _PLAIN_SEED_T + 9.0:
        raise Overflow("exponential image leaves the float range")
    return cmath.exp(z) + kappa


class _PrefixStream:
    """Entry stream backed by a finite recovered prefix (1-indexed)."""

    def __init__(self, entries):
        self._e = [int(v) for v in entries]

    def signed_two_pi(self, k: int) -> float:
        if not 1 <= k <= len(self._e):
            raise HorizonExceeded(f"recovered prefix has no entry {k}")
        return TWO_PI * self._e[k - 1]

    def abs_two_pi(self, k: int) -> float:
        return abs(self.signed_two_pi(k))


def _pull_back(ctx: RayContext, w: complex, err: float, stream, depth_hi: int,
               depth_lo: int, potentials=None, strict: bool = True) -> tuple[complex, float]:
    """Apply L_{s_j} for j = depth_hi .. depth_lo+1, tracking the error.

    An argument on (or within the band of) the cut from the singular value
    marks a severed ray: that is where inverse branches stop matching the
    ray's strips.  Inside the validity region this cannot happen (arguments
    stay far right), so there it is reported as BranchCutHit instead.
    """
    for j in range(depth_hi, depth_lo, -1):
        arg = w - ctx.kappa
        a = abs(arg)
        cut = arg.real < 0.0 and abs(arg.imag) <= ctx.broken_band
        if a <= ctx.broken_band or (cut and not strict):
            pot = potentials[j - 1] if potentials else math.nan
            raise BrokenRay(depth=j, potential=pot)
        if cut and arg.imag == 0.0:
            raise BranchCutHit(f"pullback argument on the cut at depth {j}")
        w = cmath.log(arg) + 1j * stream.signed_two_pi(j)
        err *= 1.0 / max(a - min(err, 0.5 * a), 1e-300)
    return w, err


def _g_run(ctx: RayContext, stream, t0: float) -> RayPointResult:
    """Forward to the seeding cap, seed, pull back; no membership checks."""
    pots = [t0]
    while len(pots) - 1 < ctx.depth_cap and pots[-1] <= ctx.t_max:
        try:
            drop = stream.abs_two_pi(len(pots) + 1)  # |s_{n+2}| at depth n
        except HorizonExceeded:
            if pots[-1] >= min(_SEED_FLOOR, ctx.t_max):
                break
            raise
        pots.append(model.F(pots[-1]) - drop)
    n = len(pots) - 1
    tn = pots[-1]
    if tn < 0.0:
        raise NotInX(f"potential went negative at depth {n}")

    s_head = stream.signed_two_pi(n + 1)
    seed_err = math.exp(-min(tn, 745.0)) * ctx.seed_constant
    w = None
    if tn <= _PLAIN_SEED_T:
        try:
            z_next = complex(model.F(tn) - stream.abs_two_pi(n + 2),
                             stream.signed_two_pi(n + 2))
            w = cmath.log(z_next) + 1j * s_head
        except (HorizonExceeded, Overflow):
            w = None
    if w is None:
        w = complex(tn, s_head)
    w, err = _pull_back(ctx, w, seed_err, stream, n, 0, pots)
    return RayPointResult(point=w, error_bound=err + 1e-15 * (n + 2), depth=n)


def g_point(ctx: RayContext, p: ModelPoint) -> RayPointResult:
    """Escaping-set point for a model point of the validity region.

    Requires certified membership (all forward potentials >= Q); the result
    satisfies |Re point - t| < 2 and |point - Z(s,t)| < pi + 2, and the
    returned bound dominates the true error.
    """
    if not model.in_Y(p, ctx.Q):
        raise NotInY(f"potentials of {p.address} drop below Q = {ctx.Q!r}")
    return _g_run(ctx, p.address, p.potential)


def _scan_to_certificate(ctx: RayContext, s: ExternalAddress, t: float):
    """Forward potentials until the escape certificate fires.

    Returns (potentials, cert_depth).  Raises NotInX on death, SlowEndpoint at
    a slow address's minimal potential, Indeterminate otherwise.  The scan cap
    is generous because low potentials crawl before they explode.
    """
    pots = [t]
    cur = s
    for n in range(max(4096, 2 * ctx.depth_cap)):
        tau = pots[n]
        if tau < 0.0:
            _reject_boundary(s, t)
            raise NotInX(f"potential went negative at depth {n}")
        try:
            if tau >= model.t_star(cur) + 1.0 + ctx.Q:
                return pots, n
        except (Indeterminate, HorizonExceeded, Overflow):
            pass
        if tau > _PLAIN_SEED_T:
            raise Indeterminate("potential left the range uncertified", n)
        try:
            pots.append(model.F(tau) - cur.abs_two_pi(2))
        except HorizonExceeded:
            raise Indeterminate("entries left the representable range", n)
        cur = cur.shift()
    _reject_boundary(s, t)
    raise Indeterminate("no escape certificate", 4096)


def _reject_boundary(s: ExternalAddress, t: float) -> None:
    if classify(s) is AddressClass.SLOW and t <= t_s(s) + 2e-9:
        raise SlowEndpoint(
            "the minimal-potential point of a slow address is not escaping"
        )


def g_extended(ctx: RayContext, p: ModelPoint) -> RayPointResult:
    """Extension of g_point below the validity region by ray pullbacks.

    Finds the first depth from which all potentials stay above Q, evaluates
    there, and pulls the value back along the address.  An intermediate value
    within the broken-ray band of kappa raises BrokenRay (carrying the depth
    and the potential at which the ray is severed).

    At the minimal potential of a fast address forward potential iteration is
    meaningless (the orbit rides the survival boundary), so points within
    tolerance of it are evaluated as the escaping endpoint via the certified
    backward sweep.
    """
    try:
        pots, cert = _scan_to_certificate(ctx, p.address, p.potential)
    except (NotInX, Indeterminate):
        if classify(p.address) is AddressClass.FAST and \
                abs(p.potential - t_s(p.address)) <= 2e-9:
            return _g_endpoint(ctx, p.address)
        raise
    start = cert
    while start > 0 and pots[start - 1] >= ctx.Q:
        start -= 1
    res = _g_run(ctx, p.address.shift_by(start), pots[start])
    w, err = _pull_back(ctx, res.point, res.error_bound, p.address, start, 0,
                        pots, strict=False)
    return RayPointResult(point=w, error_bound=err, depth=res.depth + start)


def _g_endpoint(ctx: RayContext, s: ExternalAddress) -> RayPointResult:
    """Value at the escaping endpoint (s, t_s), seeded off the potential sweep.

    The orbit potentials may grow arbitrarily slowly, so the escape
    certificate can sit astronomically deep; instead, membership of the tail
    in the validity region is certified analytically (every deep shift's
    potential floor clears Q) and the seed is planted depth_cap levels past
    the certified entry point, using the sweep's potentials directly.
    """
    d0 = model.tail_floor_depth(s, ctx.Q)
    need = d0 + ctx.depth_cap + 8
    pots = model.endpoint_potentials(s, need)
    L = len(pots)
    # first depth from which the windowed potentials stay above Q (the tail
    # beyond d0, and beyond any representability truncation, is certified)
    n0 = min(d0, L - 1)
    while n0 > 0 and pots[n0 - 1] >= ctx.Q:
        n0 -= 1
    if pots[n0] < ctx.Q:
        n0 += 1
    if n0 >= L:
        raise Indeterminate("endpoint orbit never certifiably clears Q", L)
    d = n0
    while d < L - 1 and pots[d] <= ctx.t_max and d - n0 < ctx.depth_cap:
        d += 1
    tn = pots[d]
    s_head = s.signed_two_pi(d + 1)
    seed_err = math.exp(-min(tn, 745.0)) * ctx.seed_constant
    w = None
    if d + 1 < L and tn <= _PLAIN_SEED_T:
        try:
            w = cmath.log(complex(pots[d + 1], s.signed_two_pi(d + 2))) \
                + 1j * s_head
        except (HorizonExceeded, ValueError):
            w = None
    if w is None:
        w = complex(tn, s_head)
        seed_err += math.pi + 2.0 if tn <= ctx.t_max else 0.0
    w, err = _pull_back(ctx, w, seed_err, s, d, 0, pots, strict=False)
    return RayPointResult(point=w, error_bound=err + 1e-14 * (d + 2), depth=d)


def ray_sample(ctx: RayContext, s: ExternalAddress, t_lo: float, t_hi: float,
               n: int) -> RaySample:
    """Sample the ray of s at n potential offsets in [t_lo, t_hi].

    Offsets are measured above the starting potential t_s (the ray
    parametrization); sample rows carry absolute potentials.  Offset 0 is the
    endpoint and is only included for fast addresses; for slow addresses the
    first sample is nudged above the (non-escaping) endpoint.  A severed ray
    loses its lower segment: broken sample points are dropped, the flag is
    set, and broken_below records where the last failure happened.
    """
    if not (0.0 <= t_lo < t_hi):
        raise ValueError("need 0 <= t_lo < t_hi")
    if n < 2:
        raise ValueError("need at least two samples")
    ts_val = t_s(s)
    fast = classify(s) is AddressClass.FAST
    offsets = [t_lo + i * (t_hi - t_lo) / (n - 1) for i in range(n)]
    endpoint_included = fast and t_lo == 0.0
    if not fast and t_lo == 0.0:
        offsets[0] = offsets[1] / 2.0
    rows = []
    broken = False
    broken_below = None
    for off in offsets:
        try:
            r = g_extended(ctx, ModelPoint(s, ts_val + off))
        except BrokenRay:
            broken = True
            broken_below = ts_val + off
            continue
        rows.append((ts_val + off, r.point, r.error_bound))
    return RaySample(
        address=s,
        samples=tuple(rows),
        broken=broken,
        endpoint_included=endpoint_included and not broken and bool(rows),
        broken_below=broken_below,
    )


def functional_equation_residual(ctx: RayContext, p: ModelPoint) -> float:
    """|E(g(p)) - g(step(p))|, the pointwise conjugation defect."""
    g_here = g_extended(ctx, p)
    g_next = g_extended(ctx, model.model_step(p))
    return abs(E(ctx, g_here.point) - g_next.point)


def g_reference_iterates(ctx: RayContext, p: ModelPoint, k_max: int) -> list[complex]:
    """The textbook approximants g_k: zero-stage seeds pulled back k levels.

    g_0 = Z(s, t) and g_{k+1} = L_{s1}(g_k(step(s, t))), which evaluates to a
    depth-k pullback of the planar coordinate of the k-th forward image.
    Usable while those images stay in the float range; serves as an
    independent oracle for g_point.
    """
    s, t = p.address, p.potential
    out = []
    pots = [t]
    for k in range(k_max + 1):
        if k > 0:
            if pots[-1] > _PLAIN_SEED_T:
                break
            pots.append(model.F(pots[-1]) - s.abs_two_pi(k + 1))
        w = complex(pots[k], s.signed_two_pi(k + 1))
        w, _ = _pull_back(ctx, w, 0.0, s, k, 0, pots)
        out.append(w)
    return out
