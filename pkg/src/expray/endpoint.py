"""Computable criteria at escaping ray endpoints.

Whether a ray is continuously differentiable in its escaping endpoint is
decided by the convergence of the angular series

    sum_j 2*pi*s_{j+1} / tau_j,

where tau_j are the potentials of the endpoint orbit.  The criterion does not
involve the parameter at all.  Any finite test of a limit is a heuristic, so
the report states its verdict together with the window it inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .address import ExternalAddress
from .errors import PreconditionSlowAddress
from .model import AddressClass, classify, endpoint_potentials


class SeriesVerdict(Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SeriesReport:
    terms: tuple[float, ...]
    partial_sums: tuple[float, ...]
    verdict: SeriesVerdict
    n_terms: int
    truncated: bool

    def __post_init__(self):
        assert len(self.terms) == len(self.partial_sums) == self.n_terms


# Verdict thresholds.  The divergence floor keeps genuinely shrinking terms
# out; the convergence band asks the tail partial sums to settle to within
# the tolerance used elsewhere in the package.
_DIVERGENT_TERM_FLOOR = 1e-3
_DIVERGENT_SUM_CAP = 1e3
_CONVERGENT_OSCILLATION = 1e-9


def verdict_from_terms(terms: list[float]) -> SeriesVerdict:
    """Windowed convergence verdict over the last quarter of the terms."""
    if not terms:
        return SeriesVerdict.INCONCLUSIVE
    sums = []
    acc = 0.0
    for v in terms:
        acc += v
        sums.append(acc)
    q = max(1, len(terms) // 4)
    window = terms[-q:]
    if all(abs(v) >= _DIVERGENT_TERM_FLOOR for v in window):
        return SeriesVerdict.DIVERGENT
    if max(abs(v) for v in sums) > _DIVERGENT_SUM_CAP:
        return SeriesVerdict.DIVERGENT
    tail = sums[-q:]
    if max(tail) - min(tail) < _CONVERGENT_OSCILLATION:
        return SeriesVerdict.CONVERGENT
    return SeriesVerdict.INCONCLUSIVE


def differentiability_series(s: ExternalAddress, n_terms: int = 40) -> SeriesReport:
    """Terms and verdict of the endpoint angular series.

    Requires an escaping endpoint (fast address).  Term j carries the sign of
    the symbol s_{j+1} and zero symbols contribute exactly zero.  Denominators
    follow the potential recursion until they leave the float range, in which
    case the report is truncated and says so.
    """
    if classify(s) is not AddressClass.FAST:
        raise PreconditionSlowAddress(
            f"{s} has no escaping endpoint (slow address)"
        )
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    pots = endpoint_potentials(s, n_terms)
    terms: list[float] = []
    for j, tau in enumerate(pots):
        num = s.signed_two_pi(j + 1)
        terms.append(0.0 if num == 0.0 else num / tau)
    sums: list[float] = []
    acc = 0.0
    for v in terms:
        acc += v
        sums.append(acc)
    return SeriesReport(
        terms=tuple(terms),
        partial_sums=tuple(sums),
        verdict=verdict_from_terms(terms),
        n_terms=len(terms),
        truncated=len(terms) < n_terms,
    )
