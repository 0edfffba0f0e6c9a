"""Landing combinatorics: which rays can share a landing point.

Two rays landing together must have entrywise close addresses (every symbol
differs by at most one).  For attracting parameters the sharp criterion is
equality of itineraries with respect to a reference partition: the plane is
cut into strips whose boundaries are the preimages of a curve through the
singular value, and combinatorially those boundaries are the addresses j.r
(an integer j prepended to a reference address r).

Convention used here: the k-th itinerary entry is u_k = j - 1 for the unique
integer j with  j.r < shift^{k-1}(s) < (j+1).r  in lexicographic order.  The
reference r is user-supplied; computing it from a parameter is out of scope.
Shifted addresses that equal a boundary (within the comparison horizon) raise
OnBoundary instead of being assigned silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .address import (
    ExternalAddress,
    Ordering,
    Periodic,
    PolyGrowth,
    Tower,
    lex_compare,
)
from .errors import (
    HorizonExceeded,
    Indeterminate,
    IndeterminateComparison,
    OnBoundary,
)


@dataclass(frozen=True)
class Itinerary:
    entries: tuple[int, ...]
    reference: ExternalAddress


def landing_compatible(a: ExternalAddress, b: ExternalAddress,
                       horizon: int = 64) -> bool:
    """Necessary condition for a common landing point: |a_k - b_k| <= 1 always.

    Checked entrywise to the horizon and then certified from the tail rules:
    jointly periodic streams are compared over a full common period, and
    mixed-growth tails eventually separate by more than one.
    """
    if a == b:
        raise ValueError("addresses must be distinct")
    ca, cb = a.canonical(), b.canonical()
    ta, tb = ca.tail, cb.tail
    scan = horizon
    certified = False
    if isinstance(ta, Periodic) and isinstance(tb, Periodic):
        lcm = math.lcm(len(ta.block), len(tb.block))
        scan = max(horizon, len(ca.prefix) + len(cb.prefix) + 2 * lcm)
        certified = True
    for k in range(1, scan + 1):
        ea = _mag_or_none(a, k)
        eb = _mag_or_none(b, k)
        if ea is None and eb is None:
            break  # both beyond the float range; the tail rules decide
        if ea is None or eb is None:
            return False  # one stream ran away, the other stayed bounded
        if abs(ea - eb) > 1.0:
            return False
    if certified:
        return True
    # distinct growth laws separate eventually; identical ones never do
    if isinstance(ta, Tower) or isinstance(tb, Tower):
        same = (
            isinstance(ta, Tower)
            and isinstance(tb, Tower)
            and (ta.x, ta.offset) == (tb.x, tb.offset)
            and abs(ta.bias - tb.bias) <= 1
        )
        if same:
            return True
        return False
    if isinstance(ta, PolyGrowth) and isinstance(tb, PolyGrowth):
        if (ta.c, ta.p, ta.sign, ta.offset) == (tb.c, tb.p, tb.sign, tb.offset):
            return abs(ta.bias - tb.bias) <= 1
        return False
    # periodic against unbounded growth
    return False


def _mag_or_none(s: ExternalAddress, k: int):
    try:
        return s.entry_float(k)
    except HorizonExceeded:
        return None


def _compare_ref(r: ExternalAddress, shifted: ExternalAddress,
                 horizon: int, k: int) -> Ordering:
    try:
        return lex_compare(r, shifted, horizon)
    except IndeterminateComparison:
        raise OnBoundary(k) from None


def itinerary(s: ExternalAddress, r: ExternalAddress, n: int,
              horizon: int = 64) -> Itinerary:
    """First n itinerary entries of s with respect to the reference r.

    u_k = s_k - 1 when r < shift^k(s), u_k = s_k - 2 when r > shift^k(s)
    (the bracketing boundaries j.r tie on the first symbol, so the verdict is
    the comparison of r with the next shift).  Equality means the shifted
    address lies on a partition boundary: OnBoundary.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    entries = []
    for k in range(1, n + 1):
        head = s.entry(k)
        ord_ = _compare_ref(r, s.shift_by(k), horizon, k)
        if ord_ is Ordering.EQUAL:
            raise OnBoundary(k)
        entries.append(head - 1 if ord_ is Ordering.LESS else head - 2)
    return Itinerary(tuple(entries), r)


def same_landing_point(a: ExternalAddress, b: ExternalAddress,
                       r: ExternalAddress, horizon: int = 64) -> bool:
    """Identical-itinerary criterion for rays landing at one point.

    Valid for parameters whose basin combinatorics is encoded by the
    reference r (attracting case).  Certified True needs jointly periodic
    streams compared over a full common period; agreement between
    non-periodic tails up to the horizon stays Indeterminate.
    """
    if a == b:
        return True
    ca, cb, cr = a.canonical(), b.canonical(), r.canonical()
    all_periodic = all(
        isinstance(t, Periodic) for t in (ca.tail, cb.tail, cr.tail)
    )
    n = horizon
    if all_periodic:
        lcm = math.lcm(
            len(ca.tail.block), len(cb.tail.block), len(cr.tail.block)
        )
        n = max(
            horizon,
            len(ca.prefix) + len(cb.prefix) + len(cr.prefix) + 2 * lcm,
        )
    if not landing_compatible(a, b, n):
        return False
    ia = itinerary(a, r, n, horizon)
    ib = itinerary(b, r, n, horizon)
    if ia.entries != ib.entries:
        return False
    if all_periodic:
        return True
    raise Indeterminate("itineraries agree but tails are not certifiable", n)
