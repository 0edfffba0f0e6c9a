"""Shared brute-force oracles, independent of the library's algorithms."""

from __future__ import annotations

import math

import pytest

from expray import per, poly, tower, with_prefix

TWO_PI = 2.0 * math.pi


def brute_t_star(entry_fn, k_max: int) -> float:
    """sup over k <= k_max of F^{-k}(2*pi*|s_{k+1}|) by direct enumeration."""
    best = 0.0
    for k in range(1, k_max + 1):
        y = TWO_PI * abs(entry_fn(k + 1))
        for _ in range(k):
            y = math.log1p(y)
        best = max(best, y)
    return best


def brute_potentials(entry_fn, t: float, n: int) -> list[float]:
    """Raw forward potentials under t -> F(t) - 2*pi*|s2|, no certificates."""
    out = [t]
    for j in range(n):
        if out[-1] > 700.0:
            break
        out.append(math.expm1(out[-1]) - TWO_PI * abs(entry_fn(j + 2)))
    return out


def brute_alive(entry_fn, t: float, n: int) -> bool:
    return all(v >= 0.0 for v in brute_potentials(entry_fn, t, n))


def linspace(lo: float, hi: float, n: int) -> list[float]:
    if n == 1:
        return [lo]
    return [lo + i * (hi - lo) / (n - 1) for i in range(n)]


@pytest.fixture
def sample_addresses():
    return [
        per(0),
        per(1),
        per(0, 1),
        per(1, 0),
        per(-2, 3),
        per(0, 1, 2),
        with_prefix([5], per(0)),
        with_prefix([0, 1, 2], per(0)),
        poly(1, 1),
        poly(0.5, 2),
        poly(3, 1, -1),
        tower(1.0),
        tower(0.5),
    ]
