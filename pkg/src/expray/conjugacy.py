"""Inverting the ray construction and conjugating two exponential maps.

A point whose orbit stays in the halfplane Re >= Q + 1 determines its address
(the strip indices of the orbit) and its potential: writing tau_j for the
orbit's real parts, the model recursion runs backwards as

    tau_{j-1} = F_inv(tau_j + 2*pi*|s_{j+1}|),

and each backward step contracts absolute errors by exp(-tau), so a couple of
orbit points pin the potential to machine precision.  The recovered pair feeds
the ray construction of a second parameter, which yields the conjugation

    phi = g_2 o (g_1)^{-1}

between the two exponential maps on the far-right set A.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import model, ray
from .address import TWO_PI
from .errors import (
    HorizonExceeded,
    LeftHalfplaneViolation,
    NotConverged,
    NotInA,
    Overflow,
    StripBoundary,
)
from .ray import RayContext, _PrefixStream, _g_run


@dataclass(frozen=True)
class OrbitRecord:
    """Orbit points with Re <= the seeding cap, plus one overshoot point.

    Strip index k means the imaginary part lies in ((2k-1)pi, (2k+1)pi).
    """

    points: tuple[complex, ...]
    strips: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.points)


def external_address_of(ctx: RayContext, z: complex, horizon: int = 16):
    """Strip indices of the orbit of z; returns (prefix, OrbitRecord).

    The orbit must stay in {Re >= Q + 1} (LeftHalfplaneViolation otherwise);
    recording stops once the real part clears the seeding cap, beyond which
    the remaining symbols influence nothing above tolerance.  A point within
    tolerance of a boundary line Im = (2k+1)pi raises StripBoundary.
    """
    w = z
    pts: list[complex] = []
    strips: list[int] = []
    err = 1e-15 * max(1.0, abs(z))
    for step in range(horizon):
        if w.real < ctx.Q + 1.0:
            raise LeftHalfplaneViolation(step)
        frac = (w.imag + math.pi) / TWO_PI
        k = math.floor(frac)
        dist = TWO_PI * min(frac - k, k + 1 - frac)
        if dist <= max(1e-9, 4.0 * err):
            raise StripBoundary(step)
        pts.append(w)
        strips.append(int(k))
        if w.real > ctx.t_max:
            break
        err *= math.exp(min(w.real, 709.0))
        if err > 0.01:
            break  # further strip readouts would be numerically meaningless
        w = cmath.exp(w) + ctx.kappa
    return tuple(strips), OrbitRecord(tuple(pts), tuple(strips))


def potential_of(ctx: RayContext, z: complex, record: OrbitRecord,
                 tol: float = 1e-9) -> float:
    """Potential of z from its orbit record, certified to tol.

    The estimate from depth k solves the model recursion backwards from
    tau_k = Re of the k-th orbit point; its distance to the true potential is
    at most exp(-sum of earlier taus) times the depth-k model/plane gap, which
    the far-right asymptotics bound by exp(-tau_k)*(2K + 2*pi + 4).
    """
    L = record.length
    if L == 0:
        raise NotConverged("empty orbit record")
    taus = [p.real for p in record.points]
    best = None
    for k in range(L):
        gap = min(1.0, math.exp(-min(taus[k], 709.0)) * (ctx.seed_constant + 1.0))
        contraction = math.exp(-min(sum(min(t, 709.0) for t in taus[:k]), 709.0))
        bound = contraction * gap
        t_est = taus[k]
        for j in range(k, 0, -1):
            t_est = model.F_inv(t_est + TWO_PI * abs(record.strips[j]))
        if best is None or bound < best[1]:
            best = (t_est, bound)
        if bound < tol:
            return t_est
    raise NotConverged(
        f"potential bound {best[1]!r} above tol after {L} orbit points"
    )


def _recover(ctx: RayContext, z: complex, tol: float):
    prefix, record = external_address_of(ctx, z)
    t = potential_of(ctx, z, record, tol)
    return prefix, record, t


def _require_in_A(ctx: RayContext, z: complex, R: float) -> None:
    """Window check of |E^n(z)| >= R for n >= 1 (stops once the orbit is huge)."""
    w = z
    for n in range(1, 7):
        if w.real > 700.0:
            return
        w = ray.E(ctx, w)
        if abs(w) < R:
            raise NotInA(
                f"orbit point {n} has magnitude {abs(w)!r}, below {R!r}"
            )


def phi(ctx1: RayContext, ctx2: RayContext, z: complex,
        tol: float = 1e-9) -> complex:
    """Conjugating map between two exponential maps at a far-right point.

    Recovers the model coordinates of z under the first parameter and plants
    them in the ray construction of the second.  Both contexts must share the
    parameter bound K (build them via contexts_for); membership of z in the
    set A (orbit magnitudes >= Q + 1 from the first image on) is checked on a
    forward window before recovery, whose own halfplane errors propagate.
    """
    R = max(ctx1.Q, ctx2.Q) + 1.0
    _require_in_A(ctx1, z, R)
    prefix, record, t = _recover(ctx1, z, tol)
    return _g_run(ctx2, _PrefixStream(prefix), t).point


def contexts_for(kappa1: complex, kappa2: complex, tol: float = 1e-12,
                 t_max: float = 50.0) -> tuple[RayContext, RayContext]:
    """Ray contexts for a conjugation, sharing K = max(|k1|, |k2|, 2pi+6) + 1."""
    K = max(abs(kappa1), abs(kappa2), TWO_PI + 6.0) + 1.0
    return (
        RayContext(kappa1, K=K, tol=tol, t_max=t_max),
        RayContext(kappa2, K=K, tol=tol, t_max=t_max),
    )


def conjugacy_report(ctx1: RayContext, ctx2: RayContext, z: complex,
                     tol: float = 1e-9) -> dict:
    """phi(z) with diagnostics: the conjugation residual and the speed table.

    residual = |phi(E1(z)) - E2(phi(z))|, both sides evaluated independently.
    The speed table lists |E1^n(z) - E2^n(phi(z))| per depth; orbit points are
    taken through the model coordinates (forward iteration of E is chaotic),
    and the table stops once a row underflows to zero or the potentials leave
    the float range.
    """
    R = max(ctx1.Q, ctx2.Q) + 1.0
    _require_in_A(ctx1, z, R)
    prefix, record, t = _recover(ctx1, z, tol)
    stream = _PrefixStream(prefix)
    image = _g_run(ctx2, stream, t).point

    e1z = ray.E(ctx1, z)
    lhs = phi(ctx1, ctx2, e1z, tol)
    rhs = ray.E(ctx2, image)
    residual = abs(lhs - rhs)

    table = []
    tau = t
    n = 0
    while n < len(prefix):
        if n == 0:
            v1, v2 = z, image
        else:
            try:
                v1 = _g_run(ctx1, _ShiftedStream(stream, n), tau).point
                v2 = _g_run(ctx2, _ShiftedStream(stream, n), tau).point
            except (HorizonExceeded, Overflow):
                break
        table.append(abs(v1 - v2))
        if table[-1] == 0.0 or tau > 700.0:
            break
        try:
            tau = model.F(tau) - stream.abs_two_pi(n + 2)
        except (HorizonExceeded, Overflow):
            break
        n += 1
    return {
        "phi": image,
        "potential": t,
        "prefix": prefix,
        "residual": residual,
        "speed_table": table,
    }


class _ShiftedStream:
    def __init__(self, base, n: int):
        self._base = base
        self._n = n

    def signed_two_pi(self, k: int) -> float:
        return self._base.signed_two_pi(k + self._n)

    def abs_two_pi(self, k: int) -> float:
        return self._base.abs_two_pi(k + self._n)
