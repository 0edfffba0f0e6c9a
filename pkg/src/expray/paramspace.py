"""Parameter rays: parameters whose singular value rides a prescribed ray.

For an address s and a potential t above the ray's starting potential there
is exactly one parameter kappa with g^kappa(s, t) = kappa.  The map
kappa -> g^kappa(s, t) is holomorphic and nearly constant (the ray point
moves by O(1/|seed|) per unit of kappa), so a derivative-free secant
iteration from the asymptotic guess t + 2*pi*i*s1 converges in a handful of
steps.  Warm-started sampling along t traces the parameter ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import model
from .address import TWO_PI, ExternalAddress
from .errors import (
    BranchCutHit,
    BrokenRay,
    DomainLost,
    HypothesisViolated,
    NoConvergence,
    PotentialTooLow,
)
from .model import F_inv_iter, ModelPoint
from .ray import RayContext, g_extended


@dataclass(frozen=True)
class ParameterRaySolution:
    kappa: complex
    residual: float
    iterations: int
    t: float
    jump_flagged: bool = False


def _ray_value(kappa: complex, s: ExternalAddress, t: float, tol: float,
               kappa_cap: float) -> complex:
    if abs(kappa) > kappa_cap:
        raise DomainLost(
            f"iterate |kappa| = {abs(kappa)!r} beyond the working bound"
        )
    ctx = RayContext(kappa, tol=min(tol * 1e-2, 1e-12))
    return g_extended(ctx, ModelPoint(s, t)).point


def _secant(s: ExternalAddress, t: float, guess: complex, tol: float,
            max_iter: int, kappa_cap: float) -> tuple[complex, float, int]:
    k0 = guess
    k1 = guess * (1.0 + 1e-6) + 1e-6j
    h0 = _ray_value(k0, s, t, tol, kappa_cap) - k0
    h1 = _ray_value(k1, s, t, tol, kappa_cap) - k1
    best = (abs(h0), k0, 0)
    it = 0
    for it in range(1, max_iter + 1):
        if h1 == h0:
            break
        step = h1 * (k1 - k0) / (h1 - h0)
        if abs(step) > 1.0:
            step *= 1.0 / abs(step)
        k0, h0 = k1, h1
        k1 = k1 - step
        h1 = _ray_value(k1, s, t, tol, kappa_cap) - k1
        if abs(h1) < best[0]:
            best = (abs(h1), k1, it)
        if abs(h1) < 0.5 * tol:
            break
    return best[1], best[0], it


def parameter_ray_point(s: ExternalAddress, t: float, tol: float = 1e-10,
                        kappa0: complex | None = None,
                        max_iter: int = 100) -> ParameterRaySolution:
    """Solve g^kappa(s, t) = kappa for the unique parameter.

    t is the absolute potential and must exceed the starting potential t_s.
    The secant iteration starts from the asymptotic guess t + 2*pi*i*s1
    (or kappa0), which lands within O(exp(-t)) of the solution for large t.
    At low potentials that guess may sit on a parameter whose own ray is
    already severed below its singular value (BrokenRay); the solve then
    continues down in potential from a clean height, warm-starting each step.
    The returned residual is |g^kappa(s, t) - kappa| re-evaluated post-solve.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    ts_val = model.t_s(s)
    if t <= ts_val + 1e-12:
        raise PotentialTooLow(f"t = {t!r} does not exceed the ray start")
    guess = kappa0 if kappa0 is not None else complex(t, s.signed_two_pi(1))
    kappa_cap = max(100.0, 4.0 * (abs(guess) + 10.0), 4.0 * (t + 10.0))

    iterations = 0
    try:
        kappa, res, iterations = _secant(s, t, guess, tol, max_iter, kappa_cap)
        if res >= tol:
            raise NoConvergence(iterations, res)
    except (BrokenRay, BranchCutHit, NoConvergence):
        kappa, iterations = _continued_solve(s, t, ts_val, tol, max_iter,
                                             kappa_cap)
    residual = abs(_ray_value(kappa, s, t, tol, kappa_cap) - kappa)
    if residual >= tol:
        raise NoConvergence(iterations, residual)
    return ParameterRaySolution(kappa=kappa, residual=residual,
                                iterations=iterations, t=t)


def _continued_solve(s: ExternalAddress, t: float, ts_val: float, tol: float,
                     max_iter: int, kappa_cap: float) -> tuple[complex, int]:
    """Walk the parameter ray down from a clean height to the target.

    High potentials solve directly from the asymptotic guess; stepping down
    geometrically keeps each warm start on an unsevered ray (the potential
    gap to the previous singular potential shrinks with the steps).
    """
    t_hi = max(2.0 * t, ts_val + 10.0)
    schedule = [t_hi]
    cur = t_hi
    while cur - t > 1e-3:
        cur = t + (cur - t) * 0.6
        schedule.append(cur)
    schedule.append(t)
    guess = complex(t_hi, s.signed_two_pi(1))
    total = 0
    final_ok = False
    for tk in schedule:
        try:
            guess, _, its = _secant(s, tk, guess, tol, max_iter, kappa_cap)
        except (BrokenRay, BranchCutHit):
            continue  # skip a bad rung; later (closer) rungs restart from guess
        total += its
        if tk == t:
            final_ok = True
    if not final_ok:
        raise NoConvergence(total, math.inf)
    return guess, total


def parameter_ray_sample(s: ExternalAddress, t_lo: float, t_hi: float, n: int,
                         tol: float = 1e-10,
                         warm_start: bool = True) -> list[ParameterRaySolution]:
    """Solve along increasing potentials in [t_lo, t_hi].

    With warm_start each solve begins at the previous parameter; without it
    every point starts from the asymptotic guess (the two modes agree within
    tol, which makes grid evaluation order-independent).  A consecutive jump
    larger than ten times the local potential step is flagged in place.
    """
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")
    if n < 2:
        raise ValueError("need at least two samples")
    ts = [t_lo + i * (t_hi - t_lo) / (n - 1) for i in range(n)]
    dt = (t_hi - t_lo) / (n - 1)
    out: list[ParameterRaySolution] = []
    prev: complex | None = None
    for t in ts:
        sol = parameter_ray_point(
            s, t, tol, kappa0=prev if warm_start else None
        )
        if prev is not None and abs(sol.kappa - prev) > 10.0 * dt:
            sol = ParameterRaySolution(sol.kappa, sol.residual, sol.iterations,
                                       sol.t, jump_flagged=True)
        out.append(sol)
        prev = sol.kappa
    return out


def kappa_lower_bound(n: int, M: float) -> float:
    """Explicit parameter bound (1/5) * F^{-(n-1)}(2*pi*M).

    Applies to period-n combinatorics whose symbol magnitudes reach M; the
    hypothesis F^{-(n-1)}(2*pi*M) >= pi + 2 keeps the bound in the regime
    where the estimate is valid.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    value = F_inv_iter(TWO_PI * M, n - 1)
    if value < math.pi + 2.0:
        raise HypothesisViolated(
            f"F^-(n-1)(2 pi M) = {value!r} is below pi + 2"
        )
    return value / 5.0
