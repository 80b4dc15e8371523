"""Finite-level missing-digit Cantor sets and their exact Newhouse thickness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Union

from .expansions import MissingDigitSpec
from .numeric import Interval, IntervalUnion, fmt_q

#: thickness of a non-degenerate interval
INF = math.inf

Thickness = Union[Fraction, float]


def fmt_thickness(t: Thickness) -> str:
    return "inf" if t == INF else fmt_q(t)


@dataclass(frozen=True)
class LevelSetSpec:
    """Depth-``depth`` approximation of ``base**scale * C_{b,D}``."""

    spec: MissingDigitSpec
    scale: int = 0
    depth: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


def cantor_hull(spec: MissingDigitSpec) -> Interval:
    """Convex hull [min D/(b-1), max D/(b-1)] of the limit set C_{b,D}."""
    if not len(spec.allowed):
        raise ValueError("no allowed digits")
    b = spec.base
    return Interval(Fraction(spec.allowed.lowest, b - 1), Fraction(spec.allowed.highest, b - 1))


def _level_set_ints(spec: MissingDigitSpec, depth: int) -> tuple[int, list[int], list[int]]:
    """Level set as integer endpoint numerators over a common denominator."""
    b = spec.base
    digits = sorted(spec.allowed)
    offsets = [0]
    for _ in range(depth):
        offsets = [o * b + c for o in offsets for c in digits]
    dmin, dmax = digits[0], digits[-1]
    den = b ** depth * (b - 1)
    los = [o * (b - 1) + dmin for o in offsets]
    his = [o * (b - 1) + dmax for o in offsets]
    return den, los, his


def level_set(ls: LevelSetSpec) -> IntervalUnion:
    """Union of the |D|**L level-L intervals, scaled by base**scale.

    Interval for the digit prefix c_1..c_L is
    sum c_t b**-t + b**-L * hull(C_{b,D}); pieces that touch are merged.
    """
    spec = ls.spec
    if len(spec.allowed) < 2:
        raise ValueError("level sets need at least two allowed digits")
    den, los, his = _level_set_ints(spec, ls.depth)
    b = spec.base
    if ls.scale >= 0:
        mul, den = b ** ls.scale, den
    else:
        mul, den = 1, den * b ** (-ls.scale)
    merged_lo, merged_hi = [los[0]], [his[0]]
    for lo, hi in zip(los[1:], his[1:]):
        if lo <= merged_hi[-1]:
            merged_hi[-1] = hi
        else:
            merged_lo.append(lo)
            merged_hi.append(hi)
    mk = Interval._trusted
    parts = [mk(Fraction(lo * mul, den), Fraction(hi * mul, den)) for lo, hi in zip(merged_lo, merged_hi)]
    if mul != 1:
        merged_lo = [x * mul for x in merged_lo]
        merged_hi = [x * mul for x in merged_hi]
    return IntervalUnion._disjoint(parts, (den, merged_lo, merged_hi))


def middle_cantor(eps, depth: int) -> IntervalUnion:
    """Level ``depth`` of the set obtained by removing the open middle
    ``eps`` fraction of [0, 1] and recursing on both halves."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    side = (1 - eps) / 2
    starts = [Fraction(0)]
    length = Fraction(1)
    for _ in range(depth):
        step = length * (side + eps)
        starts = [s + k for s in starts for k in (Fraction(0), step)]
        length *= side
    return IntervalUnion._disjoint([Interval(s, s + length) for s in starts])


# ---------------------------------------------------------------------------
# gap systems


@dataclass(frozen=True)
class Gap:
    gap: Interval
    left: Interval
    right: Interval

    @property
    def ratio(self) -> Fraction:
        return min(self.left.length, self.right.length) / self.gap.length


@dataclass(frozen=True)
class GapSystem:
    """Convex hull plus gaps in removal order, each with its two bridges."""

    hull: Interval
    gaps: tuple[Gap, ...]

    def to_json(self) -> dict:
        return {
            "hull": self.hull.to_json(),
            "gaps": [
                {"gap": g.gap.to_json(), "left": g.left.to_json(), "right": g.right.to_json()}
                for g in self.gaps
            ],
        }


def _as_ints(u: IntervalUnion) -> tuple[int, list[int], list[int]]:
    if u._ints is not None:
        return u._ints
    den = 1
    for p in u:
        for x in (p.lo, p.hi):
            d = x.denominator
            if den % d:
                den = den // gcd(den, d) * d
    los = [p.lo.numerator * (den // p.lo.denominator) for p in u]
    his = [p.hi.numerator * (den // p.hi.denominator) for p in u]
    return den, los, his


def _replay(los: list[int], his: list[int]):
    """Removal order and flanking bounds of every gap.

    Gaps are removed by non-increasing length, ties left to right.  The
    interval a gap is removed from is bounded by the nearest gaps on each side
    that were removed before it (or by the hull), found with monotone stacks.
    Returns (order, left_bound, right_bound) with bounds as integers.
    """
    n = len(los) - 1
    glo = his[:-1]
    ghi = los[1:]
    order = sorted(range(n), key=lambda i: (glo[i] - ghi[i], i))
    rank = [0] * n
    for k, i in enumerate(order):
        rank[i] = k
    left = [los[0]] * n
    stack: list[int] = []
    for i in range(n):
        while stack and rank[stack[-1]] > rank[i]:
            stack.pop()
        if stack:
            left[i] = ghi[stack[-1]]
        stack.append(i)
    right = [his[-1]] * n
    stack = []
    for i in range(n - 1, -1, -1):
        while stack and rank[stack[-1]] > rank[i]:
            stack.pop()
        if stack:
            right[i] = glo[stack[-1]]
        stack.append(i)
    return order, glo, ghi, left, right


def gap_system(u: IntervalUnion) -> GapSystem:
    if not u:
        raise ValueError("gap system of an empty set")
    den, los, his = _as_ints(u)
    order, glo, ghi, left, right = _replay(los, his)

    def q(x: int) -> Fraction:
        return Fraction(x, den)

    gaps = tuple(
        Gap(Interval(q(glo[i]), q(ghi[i])), Interval(q(left[i]), q(glo[i])), Interval(q(ghi[i]), q(right[i])))
        for i in order
    )
    return GapSystem(u.hull, gaps)


def thickness_exact(u: IntervalUnion) -> Thickness:
    """Newhouse thickness of a finite interval union, as an exact rational.

    Returns :data:`INF` for a single non-degenerate interval and 0 for a
    single point.
    """
    if not u:
        raise ValueError("thickness of an empty set")
    if len(u) == 1:
        return INF if u.parts[0].length > 0 else Fraction(0)
    den, los, his = _as_ints(u)
    order, glo, ghi, left, right = _replay(los, his)
    best_num, best_den = None, None
    for i in order:
        g = ghi[i] - glo[i]
        a = min(glo[i] - left[i], right[i] - ghi[i])
        if best_num is None or a * best_den < best_num * g:
            best_num, best_den = a, g
    return Fraction(best_num, best_den)


@dataclass(frozen=True)
class FormulaThickness:
    value: Fraction
    lower_bound: Fraction

    def to_json(self) -> dict:
        return {"value": fmt_q(self.value), "lower_bound": fmt_q(self.lower_bound)}


def thickness_formula(spec: MissingDigitSpec) -> FormulaThickness:
    """Closed form (b-1)r - 1/b for structured specs, with the bound r(b-2)."""
    if not spec.structured:
        raise ValueError(f"spec {spec.label()!r} in base {spec.base} lacks the run structure ({spec.flags()})")
    b, r = spec.base, spec.r
    return FormulaThickness((b - 1) * r - Fraction(1, b), r * (b - 2))


@dataclass(frozen=True)
class FormulaCheck:
    spec: MissingDigitSpec
    depth: int
    exact: Thickness
    formula: FormulaThickness
    evidence: GapSystem | None

    @property
    def agrees(self) -> bool:
        return self.exact == self.formula.value

    def to_json(self) -> dict:
        out = {
            "base": self.spec.base,
            "missing": sorted(self.spec.missing),
            "r": fmt_q(self.spec.r),
            "depth": self.depth,
            "exact": fmt_thickness(self.exact),
            "formula": self.formula.to_json(),
            "agrees": self.agrees,
        }
        if self.evidence is not None:
            out["evidence"] = self.evidence.to_json()
        return out


def check_formula(spec: MissingDigitSpec, depth: int) -> FormulaCheck:
    """Compare the closed form with the exact thickness of a level set.

    On disagreement the full gap system is attached as evidence.
    """
    formula = thickness_formula(spec)
    u = level_set(LevelSetSpec(spec, 0, depth))
    exact = thickness_exact(u)
    evidence = None if exact == formula.value else gap_system(u)
    return FormulaCheck(spec, depth, exact, formula, evidence)


def truncate_right_at_gap(u: IntervalUnion, target) -> tuple[IntervalUnion, Fraction]:
    """Cut u at the left endpoint of a largest gap, the one nearest target.

    Ties in distance go to the smaller endpoint.  Since every largest gap is
    removed before any gap that survives the cut can lose part of a bridge,
    the thickness of the result is at least that of u.
    """
    gaps = u.gaps()
    if not gaps:
        raise ValueError("no gap to cut at")
    longest = max(g.length for g in gaps)
    candidates = [g.lo for g in gaps if g.length == longest]
    cut = min(candidates, key=lambda x: (abs(x - target), x))
    return u.clip_right(cut), cut
