"""Symbolic model of escaping orbits for the exponential family.

State is a pair (address, potential).  One step shifts the address and maps
the potential by t -> F(t) - 2*pi*|s2|, where F(t) = exp(t) - 1 models
exponential growth and s2 is the second symbol of the current address.  A pair
survives when every forward potential stays nonnegative, and escapes when the
potentials tend to infinity.

For every address there is a minimal surviving potential t_s.  Its computable
proxy is

    t_star(s) = sup_k F^{-k}(2*pi*|s_{k+1}|),

which satisfies t_star <= t_s <= t_star + 1, and the minimal potentials obey
the exact recursion  F(t_s(s)) - 2*pi*|s2| = t_s(shift(s)).  That recursion is
contracting backwards (each inverse step multiplies interval widths by
exp(-t)), which is how :func:`t_s` reaches tolerance even where forward
survival testing is numerically undecidable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .address import (
    TWO_PI,
    ExternalAddress,
    Periodic,
    PolyGrowth,
    Tower,
    per,
    poly,
)
from .errors import (
    HorizonExceeded,
    Indeterminate,
    Overflow,
    PreconditionSlowAddress,
    SpeedSpecInvalid,
)

_T_OVERFLOW = 709.0  # expm1 overflows just past this


# -- growth model -------------------------------------------------------------


def F(t: float) -> float:
    """exp(t) - 1, the model for exponential growth."""
    if t > _T_OVERFLOW:
        raise Overflow(f"F({t!r}) exceeds the float range")
    return math.expm1(t)


def F_inv(y: float) -> float:
    """Inverse of F on [0, inf), cancellation-free for small arguments."""
    if y < 0.0:
        raise ValueError("F_inv needs a nonnegative argument")
    return math.log1p(y)


def F_iter(x: float, n: int) -> float:
    v = x
    for _ in range(n):
        v = F(v)
    return v


def F_inv_iter(y: float, n: int) -> float:
    v = y
    for _ in range(n):
        v = F_inv(v)
    return v


# -- model points --------------------------------------------------------------


@dataclass(frozen=True)
class ModelPoint:
    """Pair (address, potential).

    Potentials are nonnegative for points of the invariant set; negative
    values occur only transiently while testing survival, so the constructor
    does not reject them.
    """

    address: ExternalAddress
    potential: float

    def __post_init__(self):
        if not math.isfinite(self.potential):
            raise ValueError("potential must be finite")


def Z(p: ModelPoint) -> complex:
    """Planar coordinate t + 2*pi*i*s1 of a model point."""
    return complex(p.potential, p.address.signed_two_pi(1))


def T(p: ModelPoint) -> float:
    return p.potential


def norm(p: ModelPoint) -> float:
    return abs(Z(p))


def model_step(p: ModelPoint) -> ModelPoint:
    """(s, t) -> (shift(s), F(t) - 2*pi*|s2|); the result may go negative."""
    drop = p.address.abs_two_pi(2)
    return ModelPoint(p.address.shift(), F(p.potential) - drop)


# -- minimal potentials --------------------------------------------------------


def t_star(s: ExternalAddress, horizon: int = 64) -> float:
    """sup_k F^{-k}(2*pi*|s_{k+1}|), with the tail contribution certified.

    Splitting off the first inverse gives the exact backward recurrence

        t_star(s) = F_inv(max(2*pi*|s2|, t_star(shift(s)))),

    so the prefix folds over the tail's supremum in one pass.  Periodic tails
    are exact (every symbol value occurs within one block pass and deeper
    repeats only shrink); poly tails are enumerated until the term sequence
    is provably decreasing; tower tails approach their supremum from below
    double-exponentially fast and carry an analytic bracket.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    c = s.canonical()
    star = _tail_sup(c.tail, horizon)
    for j in range(len(c.prefix) - 1, -1, -1):
        star = F_inv(max(c.abs_two_pi(j + 2), star))
    return star


def _tail_sup(tail, horizon: int) -> float:
    """t_star of the prefix-free address carrying just this tail rule."""
    if isinstance(tail, Periodic):
        block = tail.block
        best = 0.0
        for k in range(1, 2 * len(block) + 1):
            mag = TWO_PI * abs(block[(k) % len(block)])  # |s_{k+1}|, s_j = block[(j-1) % q]
            best = max(best, F_inv_iter(mag, k))
        return best

    if isinstance(tail, PolyGrowth):
        best = 0.0
        for k in range(1, max(horizon, 8) + 1):
            try:
                mag = TWO_PI * abs(tail.entry_float(k + 1))
            except HorizonExceeded:
                # magnitudes beyond the float range sit above F of every
                # representable predecessor, so terms keep decreasing
                return best
            best = max(best, F_inv_iter(mag, k))
            if _poly_terms_decreasing(tail, k + 1):
                return best
        raise Indeterminate("poly tail supremum not certified", horizon)

    # Tower: the magnitude at index j is F^{j+offset}(x) up to the floor and
    # bias, so every sup term telescopes to F^{1+offset}(x); inverse iterates
    # contract absolute differences, which turns the floor/bias slack into an
    # analytic bracket around that value.
    mb = TWO_PI * abs(tail.bias)
    slack = TWO_PI * (1.0 + abs(tail.bias))
    a = 1 + tail.offset
    upper = lower = None
    try:
        upper = F_iter(tail.x, a) + mb
        lower = F_iter(tail.x, a) - slack
    except (Overflow, HorizonExceeded):
        pass
    best = 0.0
    for k in range(1, horizon + 1):
        try:
            mag = TWO_PI * abs(tail.entry_float(k + 1))
        except HorizonExceeded:
            break
        best = max(best, F_inv_iter(mag, k))
    if lower is not None:
        best = max(best, lower)
    if upper is not None and upper - best <= 1e-9 * (1.0 + abs(upper)):
        return max(best, min(upper, best + abs(upper) * 1e-9 + 1e-12))
    if upper is None:
        raise HorizonExceeded("tower supremum beyond the float range")
    raise Indeterminate("tower supremum bracket too wide", horizon)


def tail_floor_depth(s: ExternalAddress, Q: float) -> int:
    """First depth beyond which every shift's supremum certifiably clears Q.

    Uses the one-step lower bound t_star(shift^j) >= F_inv(2*pi*|s_{j+2}|)
    together with the eventual monotonicity of the tail magnitudes.  Only
    meaningful for fast tails (periodic tails never clear a positive floor).
    """
    c = s.canonical()
    m = len(c.prefix)
    tail = c.tail
    if isinstance(tail, Periodic):
        raise PreconditionSlowAddress("periodic tails have no escape floor")
    need = F(Q) / TWO_PI  # |s| above this makes the one-step bound >= Q
    if isinstance(tail, PolyGrowth):
        jt = (max(need + abs(tail.bias), 1.0) / tail.c) ** (1.0 / tail.p) \
            if tail.p > 0 else math.inf
        jt0 = int(math.ceil(jt)) + 1
    else:
        jt0 = 1
        v = tail.x
        for _ in range(64):
            if v - (1.0 + abs(tail.bias)) >= need * TWO_PI:
                break
            v = F(min(v, _T_OVERFLOW))
            jt0 += 1
    # tail index jt corresponds to stream position m + jt; the bound guards
    # shift j via position j + 2
    return max(0, m + jt0 - tail.offset - 2 + 1)


def star_sweep(s: ExternalAddress, n: int, horizon: int = 64) -> list[float]:
    """t_star of every shift up to n, by the backward recurrence in one pass.

    Entry j is t_star(shift_by(j)); the deep end starts from the tail's own
    supremum (reducing the start depth if the tail is not representable that
    far out).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    deep = n
    star = None
    while deep >= 0:
        try:
            star = t_star(s.shift_by(deep), horizon)
            break
        except (HorizonExceeded, Indeterminate, Overflow):
            deep -= 1
    if star is None:
        raise Indeterminate("no representable shift supremum")
    out = [0.0] * (deep + 1)
    out[deep] = star
    for j in range(deep - 1, -1, -1):
        out[j] = F_inv(max(s.abs_two_pi(j + 2), out[j + 1]))
    return out[: n + 1]


def _poly_terms_decreasing(tail: PolyGrowth, j: int) -> bool:
    """True once all deeper sup terms of a poly tail are dominated.

    term_{k+1} <= term_k iff 2pi|s_{k+2}| <= F(2pi|s_{k+1}|).  For indices
    past the bias-dominated range the magnitude ratio is at most
    exp(p/j + 2(|b|+1)/(c j^p)), which is decreasing, while F(y)/y grows with
    the (increasing) magnitudes; once the inequality holds it holds forever.
    """
    c, p, b = tail.c, tail.p, abs(tail.bias)
    base = c * float(j + tail.offset) ** p
    if base <= 2.0 * (b + 1.0):
        return False
    rho = p / (j + tail.offset) + 2.0 * (b + 1.0) / base
    y = TWO_PI * (base - (b + 1.0))
    if y > _T_OVERFLOW:
        return True
    return math.exp(rho) <= F(y) / y


def t_s(s: ExternalAddress, tol: float = 1e-9, horizon: int = 512) -> float:
    """Minimal potential at which every forward potential stays nonnegative.

    Primary method: seed the sandwich [t_star, t_star + 1] at a depth where
    the accumulated backward contraction exp(-sum of potentials) squeezes the
    interval below tol, then pull it back through the exact recursion.  Falls
    back to bisection against finite-horizon survival when no contraction is
    available (near-all-zero addresses, where that predicate is reliable).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    star0 = t_star(s)
    if star0 == 0.0:
        # every symbol past the first is zero: potentials iterate under F alone
        return 0.0

    try:
        stars = star_sweep(s, len(s.canonical().prefix) + horizon)
    except (Indeterminate, HorizonExceeded, Overflow):
        stars = [star0]
    depth = None
    total = 0.0
    for n, st in enumerate(stars):
        total += max(st, 0.0)
        if total >= 42.0:
            depth = n + 1
            break
    if depth is not None and depth < len(stars):
        got = _t_s_backward(s, depth, stars[depth], star0, tol)
        if got is not None:
            return got
    return _t_s_bisect(s, star0, tol)


def _t_s_backward(s: ExternalAddress, depth: int, deep_star: float,
                  star0: float, tol: float):
    try:
        lo = max(deep_star - 1e-9, 0.0)
        hi = deep_star + 1.0 + 1e-9
        for j in range(depth - 1, -1, -1):
            y = s.abs_two_pi(j + 2)
            lo = F_inv(lo + y)
            hi = F_inv(hi + y)
    except (Indeterminate, HorizonExceeded, Overflow):
        return None
    if hi - lo > max(tol, 4e-13):
        return None
    mid = 0.5 * (lo + hi)
    return min(max(mid, star0), star0 + 1.0)


def _t_s_bisect(s: ExternalAddress, star0: float, tol: float) -> float:
    tail = s.canonical().tail
    steps = 320
    if isinstance(tail, Periodic):
        steps = max(steps, 64 * len(tail.block))
    lo, hi = star0, star0 + 1.0
    for _ in range(max(34, int(math.log2(1.0 / tol)) + 4)):
        mid = 0.5 * (lo + hi)
        if _alive(s, mid, steps):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _alive(s: ExternalAddress, t: float, nsteps: int) -> bool:
    """Forward survival over nsteps with certificate-based early exits.

    A potential at or above t_star(current) + 1 survives forever.  Exhausting
    the step budget counts as alive, which can only bias the bisection toward
    the infimum from below.
    """
    cur = s
    tau = t
    for _ in range(nsteps):
        if tau < 0.0:
            return False
        if tau >= 1.0:
            try:
                if tau >= t_star(cur) + 1.0:
                    return True
            except (Indeterminate, HorizonExceeded, Overflow):
                pass
        if tau > _T_OVERFLOW:
            return True
        try:
            tau = F(tau) - cur.abs_two_pi(2)
        except HorizonExceeded:
            return True
        cur = cur.shift()
    return True


# -- survival and classification ------------------------------------------------


class SurvivalKind(Enum):
    DEAD = "dead"
    ESCAPES = "escapes"
    SURVIVES_SLOW = "survives_slow"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SurvivalVerdict:
    kind: SurvivalKind
    step: int | None = None
    horizon: int | None = None

    @property
    def is_dead(self) -> bool:
        return self.kind is SurvivalKind.DEAD


def survives(p: ModelPoint, horizon: int = 64) -> SurvivalVerdict:
    """Forward-iterate and report Dead / EscapesInX / SurvivesSlow.

    Escape is certified once the potential exceeds t_star(current) + 1 by a
    positive margin (the separation then grows like iterated F).  Slow
    survival is certified combinatorially for periodic tails at t = t_s,
    where forward iteration is non-robust (a sub-tolerance offset still blows
    up eventually); anything else at the horizon stays Indeterminate.
    """
    if isinstance(p.address.canonical().tail, Periodic):
        if abs(p.potential - t_s(p.address)) <= 2e-9:
            return SurvivalVerdict(SurvivalKind.SURVIVES_SLOW)
    cur = p.address
    tau = p.potential
    for n in range(horizon):
        if tau < 0.0:
            return SurvivalVerdict(SurvivalKind.DEAD, step=n)
        try:
            if tau > t_star(cur) + 1.0 + 1e-12:
                return SurvivalVerdict(SurvivalKind.ESCAPES, step=n)
        except (Indeterminate, HorizonExceeded, Overflow):
            pass
        if tau > _T_OVERFLOW:
            return SurvivalVerdict(SurvivalKind.INDETERMINATE, horizon=n)
        try:
            tau = F(tau) - cur.abs_two_pi(2)
        except HorizonExceeded:
            return SurvivalVerdict(SurvivalKind.INDETERMINATE, horizon=n)
        cur = cur.shift()
    return SurvivalVerdict(SurvivalKind.INDETERMINATE, horizon=horizon)


class AddressClass(Enum):
    NOT_EXPONENTIALLY_BOUNDED = "not_exponentially_bounded"
    FAST = "fast"
    SLOW = "slow"


def classify(s: ExternalAddress) -> AddressClass:
    """Slow when arbitrarily late windows have F-dominated entries, else fast.

    Periodic tails recur bounded windows forever, so they are slow.  Poly
    tails with p > 0 and tower tails have entry magnitudes that leave every
    fixed F-window, so their endpoints escape.  (Constant tails, p == 0,
    canonicalize to periodic.)  All built-in tails are exponentially bounded;
    the remaining enum member exists for interface completeness.
    """
    tail = s.canonical().tail
    if isinstance(tail, Periodic):
        return AddressClass.SLOW
    return AddressClass.FAST


# -- validity region ------------------------------------------------------------


def Q_threshold(K: float) -> float:
    """max(log(4(K + pi + 3)), pi + 2), the potential floor of the validity region."""
    return max(math.log(4.0 * (K + math.pi + 3.0)), math.pi + 2.0)


def in_Y(p: ModelPoint, Q: float, horizon: int = 64) -> bool:
    """Certified membership test: every forward potential stays >= Q.

    True only with a certificate (potential >= t_star(current) + 1 + Q keeps
    all later potentials above iterated F of Q); False on the first violation;
    raises Indeterminate when the horizon ends without either.
    """
    if Q < 0.0:
        raise ValueError("Q must be nonnegative")
    cur = p.address
    tau = p.potential
    for n in range(horizon):
        if tau < Q:
            return False
        try:
            if tau >= t_star(cur) + 1.0 + Q:
                return True
        except (Indeterminate, HorizonExceeded, Overflow):
            pass
        if tau > _T_OVERFLOW:
            raise Indeterminate("potential left the float range uncertified", n)
        try:
            tau = F(tau) - cur.abs_two_pi(2)
        except HorizonExceeded:
            raise Indeterminate("entries left the representable range", n)
        cur = cur.shift()
    raise Indeterminate("no certificate within horizon", horizon)


# -- endpoint potentials ----------------------------------------------------------


def endpoint_potentials(s: ExternalAddress, n: int, margin: float = 42.0) -> list[float]:
    """Potentials of the minimal-potential orbit: T after j steps, j = 0..n-1.

    Computed in one backward sweep seeded with the sandwich midpoint at a
    depth beyond n where the accumulated contraction certifies every returned
    value; the list is truncated early if the deep potentials leave the float
    range (iterated-exponential tails).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    extra = 64
    while True:
        stars = star_sweep(s, n + extra)
        deep = len(stars) - 1
        if deep <= n or sum(max(v, 0.0) for v in stars[n:deep]) >= margin \
                or extra >= 4096:
            break
        extra *= 4
    pots = [0.0] * (deep + 1)
    pots[deep] = stars[deep] + 0.5
    for j in range(deep - 1, -1, -1):
        pots[j] = F_inv(pots[j + 1] + s.abs_two_pi(j + 2))
    return pots[:n]


# -- escape speed construction ------------------------------------------------------


_SPEED_FUNCS = {
    "sqrt": lambda k: math.sqrt(float(k)),
    "log": lambda k: math.log(k + 2.0),
}


def _resolve_speed(speed, n_terms: int) -> list[float]:
    if isinstance(speed, str):
        name = speed.strip()
        if name in _SPEED_FUNCS:
            f = _SPEED_FUNCS[name]
            return [f(k) for k in range(1, n_terms + 1)]
        if name.startswith("linear:"):
            try:
                a = float(name.split(":", 1)[1])
            except ValueError:
                raise SpeedSpecInvalid(f"bad linear rate in {speed!r}") from None
            return [a * k for k in range(1, n_terms + 1)]
        raise SpeedSpecInvalid(f"unknown speed spec {speed!r}")
    vals = [float(v) for v in speed]
    if len(vals) < n_terms:
        raise SpeedSpecInvalid(f"table has {len(vals)} entries, need {n_terms}")
    return vals[:n_terms]


def escape_speed_address(speed, n_terms: int) -> ExternalAddress:
    """Address whose endpoint escapes with prescribed real parts.

    Symbol n+1 is floor(F(r_n) / 2pi); the endpoint's orbit then has
    potentials within [r_n - 2pi, r_n + 2] for every window index.  Supported
    speeds: "sqrt", "log", "linear:<a>" or an explicit table.  The tail beyond
    the window extends the last entries' growth (periodic when they have
    stabilized, poly-growth otherwise); it cannot influence the window's
    potentials beyond iterated-F suppression.
    """
    if n_terms < 4:
        raise SpeedSpecInvalid("need at least 4 window terms")
    r = _resolve_speed(speed, n_terms)
    if any(v <= 0.0 for v in r):
        raise SpeedSpecInvalid("speeds must be positive")
    if not r[-1] > r[0]:
        raise SpeedSpecInvalid("speed does not increase on the window")
    if r[-1] > 700.0:
        raise SpeedSpecInvalid("speed leaves the float range on the window")
    for i in range(len(r) - 1):
        if r[i] + 1.0 <= _T_OVERFLOW and math.expm1(r[i] + 1.0) <= r[i + 1] + 1.0:
            raise SpeedSpecInvalid(
                f"growth condition fails at window index {i + 1}"
            )
    entries = [0]
    for rn in r:
        entries.append(int(math.floor(math.expm1(rn) / TWO_PI)))

    # fit the continuation from a window wide enough to see across staircase
    # plateaus (floor(.../2pi) is flat over spans of 2*pi)
    window = entries[-min(64, max(6, len(entries) // 2)):]
    if len(set(window)) == 1:
        tail_addr = per(window[-1])
        return ExternalAddress(tuple(entries), tail_addr.tail)
    k_first = len(entries) - len(window) + 1
    k_last = len(entries)
    p_fit = (math.log(window[-1] + 1.0) - math.log(window[0] + 1.0)) / (
        math.log(k_last) - math.log(k_first)
    )
    p_fit = min(max(p_fit, 0.25), 64.0)
    c_fit = max(window[-1], 1) / float(k_last) ** p_fit
    tail = PolyGrowth(c_fit, p_fit, 1, offset=len(entries))
    return ExternalAddress(tuple(entries), tail)


# -- minimal potential (limsup) and the parabola criterion ---------------------------


def minimal_potential(s: ExternalAddress, horizon: int = 48) -> float:
    """limsup_n F^{-(n-1)}(2*pi*|s_n|), the asymptotic potential floor.

    Zero for bounded and polynomially growing symbols (every fixed window's
    contribution is crushed by the iterated inverse); for tower tails the
    decreasing upper bounds F^{-(n-1)}(t_star(shift^{n-1})) converge to the
    limit within a few steps.
    """
    tail = s.canonical().tail
    if isinstance(tail, (Periodic, PolyGrowth)):
        return 0.0
    prev = None
    last = None
    cur = s
    for n in range(1, horizon + 1):
        try:
            st = t_star(cur)
        except (Indeterminate, HorizonExceeded, Overflow):
            break
        u = F_inv_iter(st, n - 1)
        if prev is not None and abs(prev - u) <= 1e-12 * (1.0 + abs(u)):
            return u
        prev, last = u, u
        cur = cur.shift()
    if last is not None and prev is not None:
        return last
    raise Indeterminate("limsup not converged within horizon", horizon)


def parabola_condition(s: ExternalAddress, K: float, horizon: int = 24) -> bool:
    """Whether 2*pi*|s_n| stays below a modest multiple of F^{n-1}(b)**K.

    b is the minimal potential; with b = 0 the comparison scale vanishes and
    unbounded entries cannot satisfy the condition.  The verdict is a windowed
    check: ratios bounded (and not trending up) pass, ratios exploding by an
    order of magnitude per step fail, anything else is Indeterminate.
    """
    if classify(s) is not AddressClass.FAST:
        raise PreconditionSlowAddress("parabola criterion needs an escaping endpoint")
    if K <= 0.0:
        raise ValueError("exponent K must be positive")
    b = minimal_potential(s)
    if b == 0.0:
        return False
    logs: list[float] = []
    for n in range(2, horizon + 2):
        try:
            mag = s.abs_two_pi(n)
            fb = F_iter(b, n - 1)
        except (HorizonExceeded, Overflow):
            break
        if mag == 0.0:
            continue
        logs.append(math.log(mag) - K * math.log(fb))
    if len(logs) < 2:
        raise Indeterminate("parabola window too small", horizon)
    bound = math.log(1e3)
    step = math.log(10.0)
    if max(logs) <= bound and logs[-1] <= logs[0] + step:
        return True
    half = logs[len(logs) // 2 :]
    rising = all(half[i + 1] >= half[i] + step for i in range(len(half) - 1))
    if max(logs) > bound and (rising or logs[-1] > logs[0] + 2 * step):
        return False
    raise Indeterminate("parabola ratios inconclusive on the window", horizon)
