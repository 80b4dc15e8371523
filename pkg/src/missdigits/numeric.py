"""Exact rationals, closed intervals, interval unions and rigorous enclosures.

Every real quantity that is not rational (logarithms, exponentials, ``e``)
is carried as an :class:`Enclosure` whose endpoints are dyadic rationals
rounded outward, so comparisons made on enclosures are one-sided rigorous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

RationalLike = Union[int, Fraction, str]

DEFAULT_BITS = 128


def Q(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals")
    return Fraction(x)


def fmt_q(x: Fraction | int) -> str:
    """Canonical ``"p/q"`` text for a rational (lowest terms, q > 0)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def floor_q(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil_q(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


# ---------------------------------------------------------------------------
# intervals


class Interval:
    """Closed interval [lo, hi] with rational endpoints, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo, hi = Q(lo), Q(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def _trusted(cls, lo: Fraction, hi: Fraction) -> "Interval":
        obj = object.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __lt__(self, other):
        return (self.lo, self.hi) < (other.lo, other.hi)

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def scaled(self, a: Fraction, c: Fraction = Fraction(0)) -> "Interval":
        lo, hi = a * self.lo + c, a * self.hi + c
        return Interval(min(lo, hi), max(lo, hi))

    def to_json(self) -> list[str]:
        return [fmt_q(self.lo), fmt_q(self.hi)]


class IntervalUnion:
    """A finite union of closed intervals kept sorted and pairwise disjoint.

    Intervals that overlap or share an endpoint are merged on construction, so
    consecutive parts are always separated by a gap of positive length.
    """

    __slots__ = ("_parts", "_ints")

    def __init__(self, parts: Iterable[Interval] = ()):
        self._parts = _normalize(sorted(parts, key=lambda iv: (iv.lo, iv.hi)))
        self._ints = None

    @classmethod
    def from_sorted(cls, parts: Sequence[Interval]) -> "IntervalUnion":
        """Build from parts already sorted by left endpoint (no re-sort)."""
        obj = cls.__new__(cls)
        obj._parts = _normalize(parts)
        obj._ints = None
        return obj

    @classmethod
    def _disjoint(cls, parts: Sequence[Interval], ints=None) -> "IntervalUnion":
        # ints: optional (den, los, his) integer form of the same endpoints
        obj = cls.__new__(cls)
        obj._parts = tuple(parts)
        obj._ints = ints
        return obj

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "IntervalUnion":
        return cls(Interval(Q(a), Q(b)) for a, b in pairs)

    @property
    def parts(self) -> tuple[Interval, ...]:
        return self._parts

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._parts)

    def __len__(self) -> int:
        return len(self._parts)

    def __bool__(self) -> bool:
        return bool(self._parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self._parts == other._parts

    def __hash__(self) -> int:
        return hash(self._parts)

    def __repr__(self) -> str:
        inner = ", ".join(f"[{p.lo}, {p.hi}]" for p in self._parts[:6])
        more = ", ..." if len(self._parts) > 6 else ""
        return f"IntervalUnion({inner}{more})"

    @property
    def hull(self) -> Interval:
        if not self._parts:
            raise ValueError("empty union has no convex hull")
        return Interval(self._parts[0].lo, self._parts[-1].hi)

    @property
    def measure(self) -> Fraction:
        return sum((p.length for p in self._parts), Fraction(0))

    def gaps(self) -> list[Interval]:
        """Bounded complementary intervals, left to right (as closures)."""
        return [Interval(a.hi, b.lo) for a, b in zip(self._parts, self._parts[1:])]

    def contains(self, x) -> bool:
        import bisect

        i = bisect.bisect_right([p.lo for p in self._parts], x) - 1
        return i >= 0 and self._parts[i].hi >= x

    def meets_open(self, lo, hi) -> bool:
        """True iff the union meets the open interval (lo, hi)."""
        return any(p.lo < hi and p.hi > lo for p in self._parts)

    def affine(self, a, c=0) -> "IntervalUnion":
        a, c = Q(a), Q(c)
        if a == 0:
            raise ValueError("affine map must be invertible")
        parts = [p.scaled(a, c) for p in self._parts]
        if a < 0:
            parts.reverse()
        return IntervalUnion.from_sorted(parts)

    def clip_right(self, x) -> "IntervalUnion":
        """Restriction to (-inf, x]."""
        out = []
        for p in self._parts:
            if p.lo > x:
                break
            out.append(p if p.hi <= x else Interval(p.lo, Q(x)))
        return IntervalUnion.from_sorted(out)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        return union_intersect(self, other)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self._parts + other._parts)

    def to_json(self) -> list[list[str]]:
        return [p.to_json() for p in self._parts]


def _normalize(parts: Sequence[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for p in parts:
        if out and p.lo <= out[-1].hi:
            if p.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, p.hi)
        else:
            out.append(p)
    return tuple(out)


def union_intersect(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    """Exact set intersection of two interval unions (linear sweep)."""
    pa, pb = a.parts, b.parts
    i = j = 0
    out: list[Interval] = []
    while i < len(pa) and j < len(pb):
        lo = max(pa[i].lo, pb[j].lo)
        hi = min(pa[i].hi, pb[j].hi)
        if lo <= hi:
            out.append(Interval(lo, hi))
        if pa[i].hi < pb[j].hi:
            i += 1
        else:
            j += 1
    return IntervalUnion.from_sorted(out)


# ---------------------------------------------------------------------------
# enclosures


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval known to contain a real number."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("enclosure with lo > hi")

    @classmethod
    def exact(cls, x) -> "Enclosure":
        x = Q(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other):
        other = _enc(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_enc(other))

    def __rsub__(self, other):
        return _enc(other) - self

    def __mul__(self, other):
        other = _enc(other)
        c = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Enclosure(min(c), max(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _enc(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * Enclosure(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _enc(other) / self

    def to_json(self) -> dict:
        return {"lo": fmt_q(self.lo), "hi": fmt_q(self.hi)}


def _enc(x) -> Enclosure:
    return x if isinstance(x, Enclosure) else Enclosure.exact(x)


@dataclass(frozen=True)
class LogEnclosure(Enclosure):
    """Enclosure of a logarithm ratio together with the requested precision."""

    precision: Fraction = Fraction(0)

    def to_json(self) -> dict:
        d = super().to_json()
        d["precision"] = fmt_q(self.precision)
        return d


def _down(x: Fraction, bits: int) -> Fraction:
    return Fraction(floor_q(x * (1 << bits)), 1 << bits)


def _up(x: Fraction, bits: int) -> Fraction:
    return Fraction(ceil_q(x * (1 << bits)), 1 << bits)


def rounded(e: Enclosure, bits: int) -> Enclosure:
    """Outward rounding of both endpoints to multiples of 2**-bits."""
    return Enclosure(_down(e.lo, bits), _up(e.hi, bits))


def _atanh_fixed(p: int, q: int, wp: int) -> tuple[int, int]:
    """Bounds (lo, hi) on atanh(p/q) * 2**wp for 0 <= p/q <= 1/3."""
    assert 0 <= 3 * p <= q
    if p == 0:
        return 0, 0
    # tail after n terms <= t**(2n+1) / (1 - t**2) <= (9/8) 3**-(2n+1)
    n = int(wp / (2 * math.log2(3))) + 2
    s = 0
    scale = 1 << wp
    num, den = p, q
    p2, q2 = p * p, q * q
    for k in range(n):
        s += (num * scale) // (den * (2 * k + 1))
        num *= p2
        den *= q2
    return s, s + n + 2


@lru_cache(maxsize=64)
def _log2_fixed(wp: int) -> tuple[int, int]:
    lo, hi = _atanh_fixed(1, 3, wp)
    return 2 * lo, 2 * hi


def log_enclosure(x: RationalLike, bits: int = DEFAULT_BITS) -> Enclosure:
    """Rigorous enclosure of the natural log of a positive rational.

    Endpoints are multiples of 2**-bits; width is a few units of 2**-bits.
    """
    x = Q(x)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    if x == 1:
        return Enclosure.exact(0)
    m = x.numerator.bit_length() - x.denominator.bit_length()
    y = x / (Fraction(2) ** m) if m >= 0 else x * (1 << -m)
    # y in (1/2, 2); pull it into [2/3, 3/2] so that |(y-1)/(y+1)| <= 1/5
    if y > Fraction(3, 2):
        y /= 2
        m += 1
    elif y < Fraction(2, 3):
        y *= 2
        m -= 1
    wp = bits + 8 + max(m, -m).bit_length()
    t = (y - 1) / (y + 1)
    lo_a, hi_a = _atanh_fixed(abs(t.numerator), t.denominator, wp)
    if t < 0:
        lo_a, hi_a = -hi_a, -lo_a
    l2lo, l2hi = _log2_fixed(wp)
    if m >= 0:
        lo = 2 * lo_a + m * l2lo
        hi = 2 * hi_a + m * l2hi
    else:
        lo = 2 * lo_a + m * l2hi
        hi = 2 * hi_a + m * l2lo
    return rounded(Enclosure(Fraction(lo, 1 << wp), Fraction(hi, 1 << wp)), bits)


def _exp_small_fixed(p: int, q: int, wp: int) -> tuple[int, int]:
    """Bounds on exp(p/q) * 2**wp for 0 <= p/q <= 1/16."""
    assert 0 <= 16 * p <= q
    scale = 1 << wp
    s = 0
    num, den = 1, 1
    k = 0
    # terms shrink at least 16x per step; the tail is below one unit when the
    # current term is, so stop once a term vanishes at this scale
    while True:
        term = (num * scale) // den
        s += term
        k += 1
        if term == 0:
            break
        num *= p
        den *= q * k
    return s, s + k + 1


def exp_enclosure(x: RationalLike, bits: int = DEFAULT_BITS) -> Enclosure:
    """Rigorous enclosure of exp(x) for a rational x (absolute 2**-bits grid)."""
    x = Q(x)
    if x == 0:
        return Enclosure.exact(1)
    neg = x < 0
    a = -x if neg else x
    # halve until a / 2**s <= 1/16, then square s times
    s = max(0, (ceil_q(a * 16)).bit_length())
    wp = bits + 2 * s + 16 + ceil_q(a * 2)
    t = a / (1 << s)
    lo, hi = _exp_small_fixed(t.numerator, t.denominator, wp)
    lo_f, hi_f = Fraction(lo, 1 << wp), Fraction(hi, 1 << wp)
    for _ in range(s):
        lo_f = _down(lo_f * lo_f, wp)
        hi_f = _up(hi_f * hi_f, wp)
    if neg:
        lo_f, hi_f = _down(1 / hi_f, wp), _up(1 / lo_f, wp)
    return rounded(Enclosure(lo_f, hi_f), bits)


def exp_of(e: Enclosure, bits: int = DEFAULT_BITS) -> Enclosure:
    """exp applied to an enclosure (exp is increasing)."""
    return Enclosure(exp_enclosure(e.lo, bits).lo, exp_enclosure(e.hi, bits).hi)


def log_of(e: Enclosure, bits: int = DEFAULT_BITS) -> Enclosure:
    if e.lo <= 0:
        raise ValueError("log of an enclosure reaching non-positive values")
    return Enclosure(log_enclosure(e.lo, bits).lo, log_enclosure(e.hi, bits).hi)


def pow_enclosure(base: Enclosure, exponent: Enclosure, bits: int = DEFAULT_BITS) -> Enclosure:
    """base**exponent for a positive base, via exp(exponent * log(base))."""
    return exp_of(exponent * log_of(base, bits), bits)


@lru_cache(maxsize=16)
def e_enclosure(bits: int = DEFAULT_BITS) -> Enclosure:
    return exp_enclosure(1, bits)


def sqrt_enclosure(x: RationalLike, bits: int = DEFAULT_BITS) -> Enclosure:
    x = Q(x)
    if x < 0:
        raise ValueError("sqrt of a negative number")
    scale = 1 << (2 * bits)
    n = floor_q(x * scale)
    r = math.isqrt(n)
    lo = Fraction(r, 1 << bits)
    hi = Fraction(r + 1, 1 << bits) if r * r != n or n != x * scale else lo
    return Enclosure(lo, hi)


# ---------------------------------------------------------------------------
# logarithm ratios by integer-power bracketing


def _largest_power_below(a: Fraction, b: Fraction) -> int:
    """Largest k >= 0 with b**k <= a, for a >= 1 and b > 1."""
    hi = 1
    while b ** hi <= a:
        hi *= 2
    lo = hi // 2  # b**lo <= a (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if b ** mid <= a:
            lo = mid
        else:
            hi = mid
    return lo


def log_ratio_convergents(num_base: int, den_base: int) -> Iterator[tuple[int, int, bool]]:
    """Continued-fraction convergents of log(num_base)/log(den_base).

    Yields ``(p, q, final)``; ``final`` is True when the ratio equals p/q
    exactly.  Each partial quotient is found by comparing integer powers, so
    no floating point is involved.
    """
    if num_base < 1 or den_base < 2:
        raise ValueError("need num_base >= 1 and den_base >= 2")
    a_val, b_val = Fraction(num_base), Fraction(den_base)
    p_prev, q_prev, p, q = 0, 1, 1, 0
    if a_val == 1:
        yield 0, 1, True
        return
    while True:
        k = _largest_power_below(a_val, b_val)
        p_prev, q_prev, p, q = p, q, k * p + p_prev, k * q + q_prev
        rest = a_val / b_val ** k
        if rest == 1:
            yield p, q, True
            return
        yield p, q, False
        a_val, b_val = b_val, rest


def integer_root(n: int) -> tuple[int, int]:
    """Write n = r**e with r not a perfect power; returns (r, e)."""
    if n < 2:
        raise ValueError("need n >= 2")
    for e in range(n.bit_length(), 1, -1):
        r = _iroot(n, e)
        if r ** e == n:
            r0, e0 = integer_root(r)
            return r0, e0 * e
    return n, 1


def _iroot(n: int, e: int) -> int:
    """floor(n ** (1/e)) for n >= 0."""
    lo, hi = 0, 1 << (n.bit_length() // e + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** e <= n:
            lo = mid
        else:
            hi = mid
    return lo


def log_ratio(b_i: int, b_1: int, precision: RationalLike) -> LogEnclosure:
    """Rigorous enclosure of log(b_1)/log(b_i), i.e. the log of b_1 in base b_i.

    The ratio is rational exactly when both bases are powers of one common
    root, and then the exact value is returned.  Otherwise the two logs are
    enclosed by the series in :func:`log_enclosure` and the working precision
    is doubled until the quotient is narrower than ``precision``.
    """
    precision = Q(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    if b_i < 2 or b_1 < 2:
        raise ValueError("bases must be >= 2")
    r1, e1 = integer_root(b_1)
    ri, ei = integer_root(b_i)
    if r1 == ri:
        x = Fraction(e1, ei)
        return LogEnclosure(x, x, precision)
    bits = max(32, precision.denominator.bit_length() - precision.numerator.bit_length() + 16)
    while True:
        ratio = rounded(log_enclosure(b_1, bits) / log_enclosure(b_i, bits), bits)
        if ratio.width <= precision:
            return LogEnclosure(ratio.lo, ratio.hi, precision)
        bits *= 2
