"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with  pytest tests/test_acceptance.py -s  to see the per-criterion lines.
Tolerances are pinned here and nowhere else.
"""

import hashlib
import json
import math
import random

import pytest

from expray import (
    ModelPoint,
    RayContext,
    classify,
    conjugacy_report,
    contexts_for,
    differentiability_series,
    escape_speed_address,
    external_address_of,
    functional_equation_residual,
    g_extended,
    g_point,
    in_Y,
    kappa_lower_bound,
    model_step,
    parameter_ray_point,
    per,
    poly,
    potential_of,
    t_s,
    t_star,
    tower,
)
from expray.cli import main
from expray.endpoint import SeriesVerdict
from expray.errors import PreconditionSlowAddress
from expray.model import F, Q_threshold, endpoint_potentials
from expray.ray import E

from conftest import TWO_PI, linspace

KAPPAS = [-2.0, 1j, 1 + 2j, complex(math.log(TWO_PI), math.pi / 2)]
ADDRESSES = [per(0), per(0, 1), per(0, 1, 2), poly(1, 1), tower(1.0)]


def _suite_grid(s, ctx, n=20, lo=0.05, hi=3.0):
    base = t_star(s) + 1.0 + ctx.Q
    return [base + v for v in linspace(lo, hi, n)]


def _ok(n, name):
    print(f"ACCEPTANCE {n} ({name}): PASS")


def test_acceptance_01_functional_equation():
    # |E(g(s,t)) - g(step(s,t))| < 1e-8 on 4 parameters x 5 addresses x 20
    # potentials, all certified inside the validity region
    for kappa in KAPPAS:
        ctx = RayContext(kappa, tol=1e-12)
        for s in ADDRESSES:
            for t in _suite_grid(s, ctx):
                p = ModelPoint(s, t)
                assert in_Y(p, ctx.Q) is True
                assert in_Y(model_step(p), ctx.Q) is True
                assert functional_equation_residual(ctx, p) < 1e-8
    _ok(1, "functional equation")


def test_acceptance_02_bounds():
    # |Re g - t| < 2 and |g - Z| < pi + 2 on the same grid; the asymptotic
    # bound exp(-t)(2K + 2pi + 4) on the high-potential extension t >= 10
    for kappa in KAPPAS:
        ctx = RayContext(kappa, tol=1e-12)
        for s in ADDRESSES:
            high = [v for v in (10.5, 12.0, 14.0, 17.0, 20.0)
                    if v >= t_star(s) + 1.0 + ctx.Q]
            for t in _suite_grid(s, ctx) + high:
                r = g_point(ctx, ModelPoint(s, t))
                assert abs(r.point.real - t) < 2.0
                z = complex(t, s.signed_two_pi(1))
                assert abs(r.point - z) < math.pi + 2.0
                if t >= 10.0:
                    bound = math.exp(-t) * (2 * ctx.K + TWO_PI + 4.0)
                    assert abs(r.point - z) <= bound
    _ok(2, "validity-region bounds")


def test_acceptance_03_sandwich():
    # 100 random periodic addresses: t_star <= t_s <= t_star + 1 at tol 1e-9,
    # and the minimal potentials obey the exact one-step recursion to 1e-6
    rng = random.Random(20260811)
    for _ in range(100):
        block = tuple(rng.randint(-10, 10) for _ in range(rng.randint(1, 5)))
        s = per(*block)
        star = t_star(s)
        v = t_s(s, tol=1e-9)
        assert star - 1e-9 <= v <= star + 1.0 + 1e-9
        lhs = F(v) - s.abs_two_pi(2)
        assert abs(lhs - t_s(s.shift(), tol=1e-9)) < 1e-6
    _ok(3, "minimal-potential sandwich")


def test_acceptance_04_roundtrip():
    # 50 constructed points: the strip record recovers the prefix exactly and
    # the potential within 1e-8
    count = 0
    for kappa in (-2.0, 1j):
        ctx = RayContext(kappa, tol=1e-12)
        for s in (per(0), per(1), per(0, 1), per(2, -1), per(0, 1, 2)):
            base = t_star(s) + 1.0 + ctx.Q
            for dt in (1.1, 2.3, 3.7, 4.9, 6.1):
                t = base + dt
                z = g_point(ctx, ModelPoint(s, t)).point
                prefix, record = external_address_of(ctx, z)
                assert list(prefix) == s.entries(len(prefix))
                assert abs(potential_of(ctx, z, record) - t) < 1e-8
                count += 1
    assert count == 50
    _ok(4, "inversion roundtrip")


def test_acceptance_05_conjugation():
    # between -2 and i: conjugation residual < 1e-8 on 20 far-right points;
    # speed table strictly decreasing with final entry < 1e-6
    c1, c2 = contexts_for(-2.0, 1j)
    count = 0
    for s in (per(0), per(1), per(0, 1), per(0, 1, 2)):
        base = t_star(s) + 1.0 + max(c1.Q, c2.Q)
        for dt in (1.0, 1.8, 2.6, 3.4, 4.2):
            z = g_point(c1, ModelPoint(s, base + dt)).point
            rep = conjugacy_report(c1, c2, z)
            assert rep["residual"] < 1e-8
            tab = rep["speed_table"]
            assert len(tab) >= 2
            assert all(b < a for a, b in zip(tab, tab[1:]))
            assert tab[-1] < 1e-6
            count += 1
    assert count == 20
    _ok(5, "two-parameter conjugation")


def test_acceptance_06_escape_speed():
    # prescribed speeds sqrt(n) and log(n+2): the endpoint orbit's real parts
    # track r_n within 2 + 2*pi on a ten-step window past the entry depth
    ctx = RayContext(-2.0, tol=1e-12)
    specs = [
        ("sqrt", lambda n: math.sqrt(n), 220),
        ("log", lambda n: math.log(n + 2), 400),
    ]
    for name, rf, n_terms in specs:
        s = escape_speed_address(name, n_terms)
        pots = endpoint_potentials(s, n_terms - 30)
        d = len(pots) - 1
        while d > 0 and pots[d - 1] >= ctx.Q:
            d -= 1
        n0 = d + 1
        points = []
        for n in range(n0, n0 + 11):
            w = g_extended(ctx, ModelPoint(s.shift_by(n - 1), pots[n - 1])).point
            points.append(w)
            assert abs(w.real - rf(n)) <= 2.0 + TWO_PI
        # consecutive window points are related by one honest map application
        for i in range(3):
            assert abs(E(ctx, points[i]) - points[i + 1]) < 1e-6
    _ok(6, "prescribed escape speed")


def test_acceptance_07_differentiability():
    # linear symbol growth diverges (the spiral); the tower verdict is stable
    # across window sizes; bounded symbols are rejected
    assert differentiability_series(poly(1, 1), 40).verdict is SeriesVerdict.DIVERGENT
    verdicts = {differentiability_series(tower(1.0), n).verdict for n in (8, 40, 64)}
    assert verdicts == {SeriesVerdict.DIVERGENT}
    with pytest.raises(PreconditionSlowAddress):
        differentiability_series(per(0, 1))
    _ok(7, "endpoint differentiability")


def test_acceptance_08_parameter_rays():
    # the symmetric ray is real, residuals certify the defining equation, the
    # strip-1 ray approaches height 2*pi, and the explicit bound is exact
    for t in (5.0, 10.0, 20.0):
        sol = parameter_ray_point(per(0), t, tol=1e-10)
        assert abs(sol.kappa.imag) < 1e-7
        assert sol.residual < 1e-10
    sol = parameter_ray_point(per(1), 25.0, tol=1e-10)
    assert abs(sol.kappa.imag - TWO_PI) < 0.5
    assert kappa_lower_bound(1, 10.0) == 4.0 * math.pi
    _ok(8, "parameter rays")


def test_acceptance_09_conjugation_symmetry():
    # conj(g_kappa(s, t)) equals g_conj(kappa) at the negated address
    rng = random.Random(5)
    checked = 0
    while checked < 20:
        kappa = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        block = tuple(rng.randint(-3, 3) for _ in range(rng.randint(1, 3)))
        s = per(*block)
        ctx = RayContext(kappa, tol=1e-12)
        t = t_star(s) + 1.0 + ctx.Q + rng.uniform(0.1, 4.0)
        a = g_point(ctx, ModelPoint(s, t)).point
        b = g_point(RayContext(kappa.conjugate(), tol=1e-12),
                    ModelPoint(s.negate(), t)).point
        assert abs(a.conjugate() - b) < 1e-9
        checked += 1
    _ok(9, "conjugation symmetry")


def test_acceptance_10_cli_determinism(tmp_path, capsys):
    # every command, run twice with identical inputs, emits identical bytes
    ray_args = ["ray", "--kappa=-2", "--address", "[|per:0,1]",
                "--t-lo", "0", "--t-hi", "6", "--samples", "20"]
    ctx = RayContext(-2.0)
    z = g_point(ctx, ModelPoint(per(0), 9.0)).point
    pt = f"{z.real!r}+{z.imag!r}i"
    commands = [
        ["classify", "--address", "[|tower:1.0]"],
        ["ts", "--address", "[|per:0,1]"],
        ray_args,
        ["conjugate", "--kappa1=-2", "--kappa2=i", "--point", pt],
        ["param-ray", "--address", "[|per:0]", "--t", "10"],
        ["param-ray", "--address", "[|per:1]", "--t-lo", "6", "--t-hi", "10",
         "--samples", "3"],
        ["diff-endpoint", "--address", "[|poly:1,1,+]"],
        ["escape-address", "--speed", "log", "--n-terms", "24"],
        ["itinerary", "--address", "[|per:0,1]", "--ref", "[|per:0,1,1]",
         "--n", "8"],
    ]
    for argv in commands:
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second and first
    digests = []
    for run in (1, 2):
        out = tmp_path / f"img{run}.pgm"
        argv = ["escape-image", "--kappa=-2", "--bounds=-4,4,-4,4",
                "--width", "32", "--height", "32", "--max-iter", "16",
                "--out", str(out)]
        assert main(argv) == 0
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]
    _ok(10, "deterministic output")
