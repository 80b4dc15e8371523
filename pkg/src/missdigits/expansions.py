"""Base-b digit expansions of naturals and missing-digit specifications."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections.abc import Set
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional


@dataclass(frozen=True)
class DigitString:
    """Digits of a natural number, least significant first."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if not self.digits:
            raise ValueError("a digit string has at least one digit")
        if any(not 0 <= d < self.base for d in self.digits):
            raise ValueError(f"digit out of range for base {self.base}")
        if len(self.digits) > 1 and self.digits[-1] == 0:
            raise ValueError("leading zero digit")

    def msf(self) -> list[int]:
        """Digits most significant first."""
        return list(reversed(self.digits))

    def __str__(self) -> str:
        if self.base <= 36:
            return "".join("0123456789abcdefghijklmnopqrstuvwxyz"[d] for d in self.msf())
        return ":".join(str(d) for d in self.msf())


def expand_nat(n: int, b: int) -> DigitString:
    if b < 2:
        raise ValueError("base must be >= 2")
    if n < 0:
        raise ValueError("only natural numbers are expanded")
    if n == 0:
        return DigitString(b, (0,))
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return DigitString(b, tuple(out))


def eval_digits(d: DigitString) -> int:
    n = 0
    for c in reversed(d.digits):
        n = n * d.base + c
    return n


def maximal_runs(digits: Iterable[int]) -> list[tuple[int, int]]:
    """Maximal runs of consecutive integers as (first, length), sorted."""
    runs: list[tuple[int, int]] = []
    for d in sorted(set(digits)):
        if runs and runs[-1][0] + runs[-1][1] == d:
            runs[-1] = (runs[-1][0], runs[-1][1] + 1)
        else:
            runs.append((d, 1))
    return runs


class AllowedDigits(Set):
    """The digits 0..b-1 minus a missing set, without listing them.

    Bases can be in the tens of millions, so membership, counts and
    neighbours are answered from the sorted missing digits.
    """

    __slots__ = ("base", "_missing")

    def __init__(self, base: int, missing: Iterable[int]):
        self.base = base
        self._missing = tuple(sorted(set(missing)))

    def __contains__(self, d) -> bool:
        if not isinstance(d, int) or not 0 <= d < self.base:
            return False
        i = bisect_left(self._missing, d)
        return not (i < len(self._missing) and self._missing[i] == d)

    def __len__(self) -> int:
        return self.base - len(self._missing)

    def __iter__(self) -> Iterator[int]:
        prev = 0
        for m in self._missing:
            yield from range(prev, m)
            prev = m + 1
        yield from range(prev, self.base)

    def __repr__(self) -> str:
        return f"AllowedDigits(base={self.base}, missing={list(self._missing)})"

    def __hash__(self):
        return self._hash()

    def next_at_least(self, d: int) -> Optional[int]:
        """Smallest allowed digit >= d, or None."""
        d = max(d, 0)
        i = bisect_left(self._missing, d)
        while i < len(self._missing) and self._missing[i] == d:
            d += 1
            i += 1
        return d if d < self.base else None

    def prev_at_most(self, d: int) -> Optional[int]:
        """Largest allowed digit <= d, or None."""
        d = min(d, self.base - 1)
        i = bisect_right(self._missing, d) - 1
        while i >= 0 and self._missing[i] == d:
            d -= 1
            i -= 1
        return d if d >= 0 else None

    @property
    def lowest(self) -> Optional[int]:
        return self.next_at_least(0)

    @property
    def highest(self) -> Optional[int]:
        return self.prev_at_most(self.base - 1)

    def count_below(self, d: int) -> int:
        """Number of allowed digits < d."""
        d = max(0, min(d, self.base))
        return d - bisect_left(self._missing, d)

    @property
    def has_nonzero(self) -> bool:
        h = self.highest
        return h is not None and h > 0


def allowed_runs(base: int, missing: Iterable[int]) -> list[tuple[int, int]]:
    """Maximal runs of allowed digits as (first, length), from the missing set."""
    runs = []
    prev = 0
    for m in sorted(set(missing)) + [base]:
        if m > prev:
            runs.append((prev, m - prev))
        prev = m + 1
    return runs


def parse_digit_set(text: str) -> frozenset[int]:
    text = text.strip()
    if not text:
        return frozenset()
    return frozenset(int(t) for t in text.split(","))


@dataclass(frozen=True)
class MissingDigitSpec:
    """A base with a set of forbidden digits.

    ``r`` is the run fraction: every maximal run of allowed digits has length
    at least ``r * base``.  If omitted it is set to (shortest run) / base.
    The structural conditions of the multi-digit thickness theorem are
    evaluated at construction and exposed as flags rather than enforced.
    """

    base: int
    missing: frozenset[int]
    r: Optional[Fraction] = None
    allowed: AllowedDigits = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        b = self.base
        if b < 2:
            raise ValueError("base must be >= 2")
        missing = frozenset(self.missing)
        if any(not 0 <= d < b for d in missing):
            raise ValueError(f"missing digit outside 0..{b - 1}")
        object.__setattr__(self, "missing", missing)
        object.__setattr__(self, "allowed", AllowedDigits(b, missing))
        runs = allowed_runs(b, missing)
        shortest = min((length for _, length in runs), default=0)
        if self.r is None:
            object.__setattr__(self, "r", Fraction(shortest, b))
        else:
            r = Fraction(self.r)
            if r < 0 or r * b > shortest:
                raise ValueError(f"r*b = {r * b} exceeds the shortest allowed run {shortest}")
            object.__setattr__(self, "r", r)

    @classmethod
    def zero_free(cls, b: int) -> "MissingDigitSpec":
        return cls(b, frozenset({0}))

    @property
    def runs(self) -> list[tuple[int, int]]:
        return allowed_runs(self.base, self.missing)

    @property
    def zero_missing(self) -> bool:
        return 0 in self.missing

    @property
    def top_allowed(self) -> bool:
        return self.base - 1 in self.allowed

    @property
    def separated(self) -> bool:
        return all(d + 1 not in self.missing for d in self.missing)

    @property
    def structured(self) -> bool:
        """0 missing, base-1 allowed, no two consecutive missing digits."""
        return self.zero_missing and self.top_allowed and self.separated and len(self.allowed) > 0

    def flags(self) -> dict:
        return {
            "zero_missing": self.zero_missing,
            "top_allowed": self.top_allowed,
            "separated": self.separated,
            "structured": self.structured,
            "corollary_ok": self.corollary_ok,
        }

    @property
    def corollary_ok(self) -> bool:
        """Hypotheses of the corollary allowing 0 to be an allowed digit.

        No consecutive missing digits, and when 0 is allowed the run
        containing 0 must have length at least r*b + 1 (it loses the digit 0
        when 0 is added to the missing set).
        """
        if not self.separated or not self.top_allowed:
            return False
        if self.zero_missing:
            return True
        first = self.runs[0]
        return first[0] == 0 and first[1] >= self.r * self.base + 1

    def with_zero_missing(self) -> "MissingDigitSpec":
        """The same spec with 0 added to the missing digits (same r)."""
        return MissingDigitSpec(self.base, self.missing | {0}, self.r)

    def density(self) -> Fraction:
        return Fraction(len(self.allowed), self.base)

    def label(self) -> str:
        return ",".join(str(d) for d in sorted(self.missing))


def avoids(n: int, spec: MissingDigitSpec) -> bool:
    """True iff no base-b digit of n is a missing digit."""
    if n < 0:
        raise ValueError("only natural numbers are expanded")
    b, missing = spec.base, spec.missing
    if n == 0:
        return 0 not in missing
    while n:
        n, r = divmod(n, b)
        if r in missing:
            return False
    return True
