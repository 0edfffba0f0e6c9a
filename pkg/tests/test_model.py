import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expray import (
    AddressClass,
    ModelPoint,
    Q_threshold,
    SurvivalKind,
    classify,
    escape_speed_address,
    in_Y,
    minimal_potential,
    model_step,
    parabola_condition,
    per,
    poly,
    survives,
    t_s,
    t_star,
    tower,
    with_prefix,
)
from expray.errors import (
    Indeterminate,
    Overflow,
    PreconditionSlowAddress,
    SpeedSpecInvalid,
)
from expray.model import F, F_inv, F_inv_iter, F_iter, T, Z

from conftest import TWO_PI, brute_alive, brute_potentials, brute_t_star


# -- the growth function -----------------------------------------------------


def test_F_values():
    assert F(0.0) == 0.0
    assert F(1.0) == pytest.approx(1.718281828459045, abs=0.0)


def test_F_shift_identity_spot():
    # F(2) - F(1) = e * F(1), both sides near 4.670774
    lhs = F(2.0) - F(1.0)
    rhs = math.e * F(1.0)
    assert lhs == pytest.approx(4.670774270471606, rel=1e-12)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(max_examples=120, deadline=None)
@given(st.floats(0.0, 30.0), st.floats(0.0, 30.0))
def test_F_shift_identity(a, b):
    t1, t2 = min(a, b), max(a, b)
    lhs = F(t2) - F(t1)
    rhs = math.exp(t1) * F(t2 - t1)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 700.0))
def test_F_inv_roundtrip(t):
    assert F_inv(F(t)) == pytest.approx(t, rel=1e-15, abs=1e-15)


def test_F_inv_small_arguments_cancellation_free():
    y = 1e-300
    assert F_inv(y) == pytest.approx(y, rel=1e-12)


def test_F_overflow():
    with pytest.raises(Overflow):
        F(710.0)


# -- model step ----------------------------------------------------------------


def test_model_step_values():
    p = model_step(ModelPoint(per(0), 2.0))
    assert p.address == per(0)
    assert p.potential == pytest.approx(6.38905609893065, rel=1e-15)

    p = model_step(ModelPoint(per(0, 1), 2.0))
    assert p.address == per(1, 0)
    assert p.potential == pytest.approx(0.10587079175106417, rel=1e-12)


def test_model_step_fixes_zero():
    p = model_step(ModelPoint(per(0), 0.0))
    assert p.potential == 0.0


def test_Z_and_T():
    p = ModelPoint(per(3), 2.5)
    assert Z(p) == complex(2.5, 3 * TWO_PI)
    assert T(p) == 2.5


# -- t_star -----------------------------------------------------------------


def test_t_star_zero_address():
    assert t_star(per(0)) == 0.0


def test_t_star_per01():
    v = t_star(per(0, 1))
    assert v == pytest.approx(math.log(1 + TWO_PI), rel=1e-15)
    assert v == pytest.approx(1.9855683087099187, abs=0.0)
    assert v == pytest.approx(brute_t_star(per(0, 1).entry, 50), rel=1e-15)


def test_t_star_large_prefix_entry():
    s = with_prefix([0, 100], per(0))
    assert t_star(s) == pytest.approx(math.log(1 + 200 * math.pi), rel=1e-15)
    assert t_star(s) == pytest.approx(6.444637536655772, abs=0.0)


def test_t_star_matches_brute_enumeration(sample_addresses):
    for s in sample_addresses:
        try:
            got = t_star(s)
        except Exception:
            continue
        try:
            brute = brute_t_star(s.entry, 24)
        except Exception:
            continue
        assert got >= brute - 1e-12
        assert got <= brute + 1.0  # enumeration may undershoot the sup


def test_t_star_random_periodic_against_oracle():
    rng = random.Random(7)
    for _ in range(40):
        block = tuple(rng.randint(-8, 8) for _ in range(rng.randint(1, 5)))
        s = per(*block)
        assert t_star(s) == pytest.approx(
            brute_t_star(s.entry, 3 * len(block) + 30), rel=1e-13, abs=1e-13
        )


# -- t_s ------------------------------------------------------------------------


def test_t_s_zero_address():
    assert t_s(per(0)) == 0.0


def test_t_s_per01_bracket_and_golden():
    v = t_s(per(0, 1))
    assert 1.9855683087099187 <= v <= 2.9855683087099187
    assert v == pytest.approx(2.1311544640068845, abs=5e-13)


def test_t_s_functional_equation():
    a = per(0, 1)
    lhs = F(t_s(a)) - TWO_PI * 1
    assert lhs == pytest.approx(t_s(per(1, 0)), abs=1e-9)


def test_t_s_survival_boundary_oracle():
    # just above t_s the raw iteration survives a window, just below it dies
    for s in (per(0, 1), per(2, -1, 0), poly(1, 1)):
        v = t_s(s)
        assert brute_alive(s.entry, v + 1e-6, 12)
        assert not brute_alive(s.entry, v - 1e-6, 400)
    # tower: below the sandwich floor the orbit dies inside the entry window
    # (tiny offsets need unrepresentable depth, which is why t_s is computed
    # by backward contraction instead of forward survival)
    v = t_s(tower(1.0))
    assert not brute_alive(tower(1.0).entry, v - 0.13, 2)
    assert brute_alive(tower(1.0).entry, v + 1e-6, 2)


def test_sandwich_random_periodic():
    rng = random.Random(11)
    for _ in range(60):
        block = tuple(rng.randint(-10, 10) for _ in range(rng.randint(1, 5)))
        s = per(*block)
        star = t_star(s)
        v = t_s(s)
        assert star - 1e-9 <= v <= star + 1.0 + 1e-9


def test_monotone_separation():
    # potentials of t + delta run ahead by at least iterated F of delta
    s = per(1, 0, 2)
    t = t_s(s)
    delta = 0.3
    lo = brute_potentials(s.entry, t, 6)
    hi = brute_potentials(s.entry, t + delta, 6)
    gap = delta
    for a, b in zip(lo[1:], hi[1:]):
        gap = F(gap)
        assert b - a >= gap - 1e-9 * max(1.0, abs(b))


# -- survival ----------------------------------------------------------------------


def test_survives_escape():
    v = survives(ModelPoint(per(0), 1.0))
    assert v.kind is SurvivalKind.ESCAPES


def test_survives_dead():
    v = survives(ModelPoint(per(0, 1), 1.0))
    assert v.kind is SurvivalKind.DEAD
    assert v.step == 1
    # direct check: F(1) - 2pi < 0
    assert F(1.0) - TWO_PI == pytest.approx(-4.564903478720542, rel=1e-12)


def test_survives_slow_fixed_point():
    v = survives(ModelPoint(per(0), 0.0))
    assert v.kind is SurvivalKind.SURVIVES_SLOW


def test_survives_slow_at_periodic_minimal_potential():
    for block in [(0, 1), (2, -1), (1, 0, 3)]:
        s = per(*block)
        assert survives(ModelPoint(s, t_s(s))).kind is SurvivalKind.SURVIVES_SLOW


def test_classify_examples():
    assert classify(per(0, 1)) is AddressClass.SLOW
    assert classify(tower(1.0)) is AddressClass.FAST
    assert classify(poly(1, 1)) is AddressClass.FAST
    assert classify(poly(1, 0)) is AddressClass.SLOW


def test_classify_fast_addresses_have_escaping_endpoints():
    # endpoint potentials tend to infinity for the fast taxa
    from expray.model import endpoint_potentials

    for s in (tower(1.0), poly(1, 1), poly(0.5, 2)):
        pots = endpoint_potentials(s, 48)
        assert pots[-1] > pots[0] + 2.0
        assert all(b > a for a, b in zip(pots, pots[1:]))


def test_classify_agrees_with_survival_for_small_periodic():
    rng = random.Random(3)
    for _ in range(25):
        block = tuple(rng.randint(-5, 5) for _ in range(rng.randint(1, 4)))
        s = per(*block)
        assert classify(s) is AddressClass.SLOW
        assert survives(ModelPoint(s, t_s(s))).kind is SurvivalKind.SURVIVES_SLOW


# -- validity region -------------------------------------------------------------


def test_Q_threshold_values():
    assert Q_threshold(TWO_PI + 6.0) == pytest.approx(math.pi + 2.0, abs=0.0)
    assert math.log(4 * (TWO_PI + 6 + math.pi + 3)) == pytest.approx(
        4.299990748146795, rel=1e-12
    )
    assert Q_threshold(100.0) == pytest.approx(
        math.log(4 * (100 + math.pi + 3)), abs=0.0
    )
    assert Q_threshold(100.0) == pytest.approx(6.051068343622719, abs=0.0)


def test_in_Y_certified_true():
    Q = Q_threshold(TWO_PI + 6.0)
    assert in_Y(ModelPoint(per(0), Q + 1.0), Q) is True


def test_in_Y_certified_false():
    Q = Q_threshold(TWO_PI + 6.0)
    assert in_Y(ModelPoint(per(0), Q - 0.1), Q) is False
    # a later potential dips below Q: F(Q + 0.5) - 2*pi*44 = 5.11 < Q
    assert in_Y(ModelPoint(per(0, 44), Q + 0.5), Q) is False


def test_in_Y_indeterminate_at_boundary():
    s = per(0, 1)
    with pytest.raises(Indeterminate):
        in_Y(ModelPoint(s, t_s(s) + 1e-12), 0.0, horizon=16)


# -- escape speed construction ------------------------------------------------------


def test_escape_speed_linear_entries():
    s = escape_speed_address("linear:1", 10)
    # entry n+1 is floor(F(n)/2pi)
    assert s.entries(4) == [0, 0, 1, 3]


def test_escape_speed_log_staircase():
    s = escape_speed_address("log", 30)
    for n in range(1, 28):
        assert s.entry(n + 1) == math.floor((n + 1) / TWO_PI)


def test_escape_speed_constant_invalid():
    with pytest.raises(SpeedSpecInvalid):
        escape_speed_address([1.0] * 12, 12)


def test_escape_speed_table_accepted():
    s = escape_speed_address([math.sqrt(k) for k in range(1, 25)], 24)
    assert classify(s) in (AddressClass.FAST, AddressClass.SLOW)


# -- minimal potential and the parabola criterion --------------------------------------


def test_minimal_potential_slow_is_zero():
    assert minimal_potential(per(0, 1)) == 0.0
    assert minimal_potential(per(0)) == 0.0


def test_minimal_potential_tower():
    b = minimal_potential(tower(1.0))
    star = t_star(tower(1.0))
    assert 0.0 < b <= star + 1.0
    # oracle: limsup of the enumerated terms approaches b from below
    terms = []
    for n in range(2, 5):
        y = tower(1.0).abs_two_pi(n)
        v = F_inv_iter(y, n - 1)
        terms.append(v)
    assert max(terms) == pytest.approx(b, rel=1e-9)


def test_parabola_condition_tower():
    assert parabola_condition(tower(1.0), 1.0) is True
    assert parabola_condition(tower(1.0), 0.01) is False


def test_parabola_condition_rejects_slow():
    with pytest.raises(PreconditionSlowAddress):
        parabola_condition(per(0, 1), 1.0)


def test_parabola_condition_poly_fails_all_exponents():
    assert parabola_condition(poly(1, 1), 1.0) is False
    assert parabola_condition(poly(1, 1), 8.0) is False
