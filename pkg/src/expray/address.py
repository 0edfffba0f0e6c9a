"""External addresses: integer symbol streams with a finite prefix and a tail rule.

An external address s = s1 s2 s3 ... records which horizontal strip of height
2*pi each point of an orbit occupies; it is the combinatorial coordinate of a
dynamic ray.  Addresses here consist of an explicit integer prefix followed by
one of three computable tail rules:

* ``Periodic(block)``: the block repeats forever.
* ``PolyGrowth(c, p, sign)``: tail entry k is ``sign * ceil(c * k**p)``.
* ``Tower(x)``: tail entry k is ``floor(F^k(x) / (2*pi))`` with
  ``F(t) = exp(t) - 1``.  These grow as iterated exponentials, so entries are
  only evaluated while they fit the representable range; beyond that
  :class:`~expray.errors.HorizonExceeded` is raised instead of saturating.

Shifting consumes the prefix and then advances an index offset inside the
tail; translating by an integer adds a bias.  Both keep every operation total
on the representable window.

Text grammar (used by the CLI, CSV headers and JSON payloads)::

    addr   := "[" prefix "|" tail "]"
    prefix := comma separated integers (possibly empty)
    tail   := "per:" ints
            | "poly:" c "," p "," sign [ "," offset [ "," bias ] ]
            | "tower:" x [ "," offset [ "," bias ] ]

Examples: ``[0,1|per:2,3]``, ``[|tower:1.0]``, ``[|poly:1,1,+]``.  The offset
and bias fields only appear for shifted or translated tails.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import HorizonExceeded, IndeterminateComparison, ParseError

TWO_PI = 2.0 * math.pi

# Entries must stay within 64-bit integers; tail-internal float quantities
# (tower iterates, poly magnitudes) may go up to _FLOAT_CAP before the entry
# stream is declared out of range.
_INT_CAP = 2 ** 62
_FLOAT_CAP = 1e306


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _exp_tower(x: float, n: int) -> float:
    """F^n(x) with F(t) = exp(t) - 1, guarded against float overflow."""
    v = x
    for _ in range(n):
        if v > 709.0:
            raise HorizonExceeded(f"tower iterate beyond float range (log {v!r})")
        v = math.expm1(v)
        if v > _FLOAT_CAP:
            raise HorizonExceeded("tower iterate beyond float range")
    return v


@dataclass(frozen=True)
class Periodic:
    block: tuple[int, ...]

    def __post_init__(self):
        if not self.block:
            raise ValueError("periodic block must be nonempty")

    def entry(self, j: int) -> int:
        return self.block[(j - 1) % len(self.block)]


@dataclass(frozen=True)
class PolyGrowth:
    c: float
    p: float
    sign: int = 1
    offset: int = 0
    bias: int = 0

    def __post_init__(self):
        if not (self.c > 0.0):
            raise ValueError("poly tail needs c > 0")
        if self.p < 0.0:
            raise ValueError("poly tail needs p >= 0")
        if self.sign not in (1, -1):
            raise ValueError("poly tail sign must be +1 or -1")

    def _raw(self, j: int) -> float:
        return self.c * float(j + self.offset) ** self.p

    def entry(self, j: int) -> int:
        v = self._raw(j)
        if v > _INT_CAP:
            raise HorizonExceeded(f"poly entry {j} beyond 64-bit range")
        return self.sign * math.ceil(v) + self.bias

    def entry_float(self, j: int) -> float:
        v = self._raw(j)
        if v > _FLOAT_CAP:
            raise HorizonExceeded(f"poly entry {j} beyond float range")
        if v <= _INT_CAP:
            return float(self.sign * math.ceil(v) + self.bias)
        return self.sign * v + self.bias


@dataclass(frozen=True)
class Tower:
    x: float
    offset: int = 0
    bias: int = 0

    def __post_init__(self):
        if not (self.x > 0.0):
            raise ValueError("tower tail needs x > 0")

    def entry(self, j: int) -> int:
        v = _exp_tower(self.x, j + self.offset)
        q = math.floor(v / TWO_PI)
        if q > _INT_CAP:
            raise HorizonExceeded(f"tower entry {j} beyond 64-bit range")
        return int(q) + self.bias

    def entry_float(self, j: int) -> float:
        v = _exp_tower(self.x, j + self.offset)
        # floor(v / 2pi) without materializing an int: v - fmod is exact in ieee
        return (v - math.fmod(v, TWO_PI)) / TWO_PI + self.bias


Tail = Union[Periodic, PolyGrowth, Tower]


def _primitive_block(block: tuple[int, ...]) -> tuple[int, ...]:
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and block == block[:d] * (n // d):
            return block[:d]
    return block


@dataclass(frozen=True, eq=False)
class ExternalAddress:
    """An integer symbol stream: finite prefix followed by a tail rule.

    Entries are 1-indexed (``entry(1)`` is the first symbol).  Two addresses
    compare equal when their canonical forms coincide, which for periodic
    tails decides stream equality exactly.
    """

    prefix: tuple[int, ...]
    tail: Tail
    _canon: "ExternalAddress" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(e) for e in self.prefix))

    # -- entry access ----------------------------------------------------

    def entry(self, k: int) -> int:
        """Symbol s_k (k >= 1); raises HorizonExceeded beyond the 64-bit range."""
        if k < 1:
            raise ValueError("entries are 1-indexed")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return self.tail.entry(k - len(self.prefix))

    def entries(self, n: int) -> list[int]:
        return [self.entry(k) for k in range(1, n + 1)]

    def entry_float(self, k: int) -> float:
        """s_k as a float; exact while integral, usable beyond the 64-bit cap."""
        if k < 1:
            raise ValueError("entries are 1-indexed")
        if k <= len(self.prefix):
            return float(self.prefix[k - 1])
        j = k - len(self.prefix)
        if isinstance(self.tail, Periodic):
            return float(self.tail.entry(j))
        return self.tail.entry_float(j)

    def signed_two_pi(self, k: int) -> float:
        """2*pi*s_k as a float."""
        return TWO_PI * self.entry_float(k)

    def abs_two_pi(self, k: int) -> float:
        """2*pi*|s_k| as a float."""
        return abs(self.signed_two_pi(k))

    # -- structural operations --------------------------------------------

    def shift(self) -> "ExternalAddress":
        """Drop the first symbol: entry(shift(s), k) == entry(s, k+1)."""
        return self.shift_by(1)

    def shift_by(self, n: int) -> "ExternalAddress":
        if n < 0:
            raise ValueError("shift count must be nonnegative")
        if n == 0:
            return self
        m = len(self.prefix)
        taken = min(n, m)
        rest = n - taken
        prefix = self.prefix[taken:]
        tail = self.tail
        if rest:
            if isinstance(tail, Periodic):
                q = len(tail.block)
                r = rest % q
                tail = Periodic(tail.block[r:] + tail.block[:r])
            elif isinstance(tail, PolyGrowth):
                tail = PolyGrowth(tail.c, tail.p, tail.sign, tail.offset + rest, tail.bias)
            else:
                tail = Tower(tail.x, tail.offset + rest, tail.bias)
        return ExternalAddress(prefix, tail)

    def translate(self, j: int) -> "ExternalAddress":
        """Add j to every symbol."""
        j = int(j)
        prefix = tuple(e + j for e in self.prefix)
        tail = self.tail
        if isinstance(tail, Periodic):
            tail = Periodic(tuple(b + j for b in tail.block))
        elif isinstance(tail, PolyGrowth):
            tail = PolyGrowth(tail.c, tail.p, tail.sign, tail.offset, tail.bias + j)
        else:
            tail = Tower(tail.x, tail.offset, tail.bias + j)
        return ExternalAddress(prefix, tail)

    def negate(self) -> "ExternalAddress":
        """Negate every symbol (mirror across the real axis)."""
        prefix = tuple(-e for e in self.prefix)
        tail = self.tail
        if isinstance(tail, Periodic):
            return ExternalAddress(prefix, Periodic(tuple(-b for b in tail.block)))
        if isinstance(tail, PolyGrowth):
            return ExternalAddress(
                prefix, PolyGrowth(tail.c, tail.p, -tail.sign, tail.offset, -tail.bias)
            )
        raise ValueError("tower tails have no negated counterpart")

    def prepend(self, j: int) -> "ExternalAddress":
        return ExternalAddress((int(j),) + self.prefix, self.tail)

    # -- canonical form and equality ---------------------------------------

    def canonical(self) -> "ExternalAddress":
        """Normal form: minimal periodic block with the prefix absorbed.

        Constant-growth poly tails (p == 0) reduce to periodic tails, which
        makes equality across those taxa decidable.
        """
        if self._canon is not None:
            return self._canon
        prefix, tail = self.prefix, self.tail
        if isinstance(tail, PolyGrowth) and tail.p == 0.0:
            tail = Periodic((tail.sign * math.ceil(tail.c) + tail.bias,))
        if isinstance(tail, Periodic):
            block = _primitive_block(tail.block)
            prefix = list(prefix)
            while prefix and prefix[-1] == block[-1]:
                prefix.pop()
                block = (block[-1],) + block[:-1]
            out = ExternalAddress(tuple(prefix), Periodic(block))
        else:
            out = ExternalAddress(prefix, tail)
        object.__setattr__(self, "_canon", out)
        object.__setattr__(out, "_canon", out)
        return out

    def _key(self):
        c = self.canonical()
        return (c.prefix, type(c.tail).__name__, c.tail)

    def __eq__(self, other):
        if not isinstance(other, ExternalAddress):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    # -- text form ---------------------------------------------------------

    def to_text(self) -> str:
        prefix = ",".join(str(e) for e in self.prefix)
        t = self.tail
        if isinstance(t, Periodic):
            tail = "per:" + ",".join(str(b) for b in t.block)
        elif isinstance(t, PolyGrowth):
            tail = f"poly:{_fmt_num(t.c)},{_fmt_num(t.p)},{'+' if t.sign > 0 else '-'}"
            if t.offset or t.bias:
                tail += f",{t.offset},{t.bias}"
        else:
            tail = f"tower:{_fmt_num(t.x)}"
            if t.offset or t.bias:
                tail += f",{t.offset},{t.bias}"
        return f"[{prefix}|{tail}]"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"ExternalAddress({self.to_text()!r})"


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


# -- constructors ---------------------------------------------------------


def per(*block: int) -> ExternalAddress:
    return ExternalAddress((), Periodic(tuple(int(b) for b in block)))


def poly(c: float, p: float, sign: int = 1) -> ExternalAddress:
    return ExternalAddress((), PolyGrowth(float(c), float(p), int(sign)))


def tower(x: float) -> ExternalAddress:
    return ExternalAddress((), Tower(float(x)))


def with_prefix(prefix, tail_address: ExternalAddress) -> ExternalAddress:
    return ExternalAddress(
        tuple(int(e) for e in prefix) + tail_address.prefix, tail_address.tail
    )


# -- parsing ----------------------------------------------------------------

_ADDR_RE = re.compile(r"^\[(?P<prefix>[^|\[\]]*)\|(?P<tail>[^|\[\]]+)\]$")


def parse(text: str) -> ExternalAddress:
    """Parse the bracketed address grammar; ParseError carries a position."""
    m = _ADDR_RE.match(text.strip())
    if not m:
        bar = text.find("|")
        raise ParseError(
            f"malformed address {text!r} (expected '[prefix|tail]', "
            f"'|' at {bar})"
        )
    prefix_src = m.group("prefix").strip()
    try:
        prefix = tuple(int(e) for e in prefix_src.split(",") if e.strip() != "") \
            if prefix_src else ()
    except ValueError as exc:
        raise ParseError(f"bad prefix entry in {text!r}: {exc}") from None
    tail_src = m.group("tail").strip()
    kind, sep, rest = tail_src.partition(":")
    if not sep or not rest.strip():
        raise ParseError(
            f"bad tail {tail_src!r} at position {text.find('|') + 1}"
        )
    parts = [p.strip() for p in rest.split(",")]
    try:
        if kind == "per":
            tail: Tail = Periodic(tuple(int(p) for p in parts))
        elif kind == "poly":
            if len(parts) not in (3, 4, 5):
                raise ValueError("poly tail takes c,p,sign[,offset[,bias]]")
            sign = {"+": 1, "-": -1, "+1": 1, "-1": -1, "1": 1}.get(parts[2])
            if sign is None:
                raise ValueError(f"bad sign {parts[2]!r}")
            offset = int(parts[3]) if len(parts) > 3 else 0
            bias = int(parts[4]) if len(parts) > 4 else 0
            tail = PolyGrowth(float(parts[0]), float(parts[1]), sign, offset, bias)
        elif kind == "tower":
            if len(parts) not in (1, 2, 3):
                raise ValueError("tower tail takes x[,offset[,bias]]")
            offset = int(parts[1]) if len(parts) > 1 else 0
            bias = int(parts[2]) if len(parts) > 2 else 0
            tail = Tower(float(parts[0]), offset, bias)
        else:
            raise ValueError(f"unknown tail kind {kind!r}")
    except ValueError as exc:
        raise ParseError(f"bad tail in {text!r}: {exc}") from None
    return ExternalAddress(prefix, tail)


# -- lexicographic order -----------------------------------------------------


def _entry_surrogate(a: ExternalAddress, k: int) -> float:
    """Comparison surrogate for s_k: exact int when possible, else a float
    (or +/-inf when even the float range is exceeded)."""
    try:
        return a.entry_float(k)
    except HorizonExceeded:
        t = a.tail
        if isinstance(t, PolyGrowth):
            return math.inf if t.sign > 0 else -math.inf
        return math.inf  # tower entries are positive


def lex_compare(a: ExternalAddress, b: ExternalAddress, horizon: int = 64) -> Ordering:
    """Lexicographic comparison decided by the first differing entry.

    EQUAL is only returned when the canonical forms coincide, so that the
    verdict is a proof; streams that merely agree up to the horizon raise
    IndeterminateComparison.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if a == b:
        return Ordering.EQUAL
    for k in range(1, horizon + 1):
        ea = _entry_surrogate(a, k)
        eb = _entry_surrogate(b, k)
        if ea == eb:
            continue
        if math.isinf(ea) and math.isinf(eb):
            raise IndeterminateComparison(
                f"entries {k} both out of range with equal signs"
            )
        return Ordering.LESS if ea < eb else Ordering.GREATER
    raise IndeterminateComparison(
        f"streams agree to horizon {horizon} but canonical forms differ"
    )


def lex_less(a: ExternalAddress, b: ExternalAddress, horizon: int = 64) -> bool:
    return lex_compare(a, b, horizon) is Ordering.LESS
