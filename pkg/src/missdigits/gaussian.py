"""Digit systems, expansions and missing-digit sets over the Gaussian integers."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union


@dataclass(frozen=True, order=True)
class GaussianInt:
    re: int
    im: int = 0

    @classmethod
    def of(cls, z: Union["GaussianInt", int, tuple, str]) -> "GaussianInt":
        if isinstance(z, GaussianInt):
            return z
        if isinstance(z, int):
            return cls(z, 0)
        if isinstance(z, tuple):
            return cls(int(z[0]), int(z[1]))
        return parse_gaussian(z)

    def __add__(self, o):
        o = GaussianInt.of(o)
        return GaussianInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianInt.of(o)
        return GaussianInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianInt.of(o) - self

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussianInt.of(o)
        return GaussianInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not Gaussian integers")
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divides(self, z: "GaussianInt") -> bool:
        n = self.norm()
        w = GaussianInt.of(z) * self.conj()
        return w.re % n == 0 and w.im % n == 0

    def exact_div(self, d: "GaussianInt") -> "GaussianInt":
        n = d.norm()
        w = self * d.conj()
        if w.re % n or w.im % n:
            raise ArithmeticError(f"{d} does not divide {self}")
        return GaussianInt(w.re // n, w.im // n)

    def __str__(self) -> str:
        a, b = self.re, self.im
        if b == 0:
            return str(a)
        ib = "i" if abs(b) == 1 else f"{abs(b)}i"
        if a == 0:
            return ib if b > 0 else "-" + ib
        return f"{a}{'+' if b > 0 else '-'}{ib}"

    def __repr__(self) -> str:
        return f"GaussianInt({self})"


ZERO = GaussianInt(0, 0)
ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)
UNITS = (ONE, -ONE, I, -I)


def parse_gaussian(text: str) -> GaussianInt:
    """Parse "a+bi", "a-bi", "a", "bi", "i", "-i"."""
    s = text.replace(" ", "").replace("j", "i")
    try:
        if not s.endswith("i"):
            return GaussianInt(int(s), 0)
        body = s[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        real, imag = (body[:cut], body[cut:]) if cut > 0 else ("0", body)
        im = {"": 1, "+": 1, "-": -1}.get(imag)
        return GaussianInt(int(real), im if im is not None else int(imag))
    except ValueError:
        raise ValueError(f"cannot parse Gaussian integer {text!r}") from None


def parse_gaussian_list(text: str) -> list[GaussianInt]:
    return [parse_gaussian(t) for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# residues and digit systems


def reduce_mod(z: GaussianInt, b: GaussianInt) -> GaussianInt:
    """Representative of z mod b in the half-open parallelogram spanned by b, ib."""
    n = b.norm()
    w = z * b.conj()
    q = GaussianInt(w.re // n, w.im // n)
    return z - q * b


@dataclass(frozen=True)
class GaussianDigitSystem:
    base: GaussianInt
    digits: tuple[GaussianInt, ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        b = self.base
        if b.norm() < 2:
            raise ValueError("base must be neither zero nor a unit")
        object.__setattr__(self, "digits", tuple(self.digits))
        if not validate_digit_system(b, self.digits):
            raise ValueError(f"{[str(d) for d in self.digits]} is not a complete residue system mod {b}")
        object.__setattr__(self, "_lookup", {reduce_mod(d, b): d for d in self.digits})

    @property
    def norm(self) -> int:
        return self.base.norm()

    def digit_for(self, z: GaussianInt) -> GaussianInt:
        return self._lookup[reduce_mod(z, self.base)]

    def to_json(self) -> dict:
        return {"base": str(self.base), "norm": self.norm, "digits": [str(d) for d in self.digits]}


def _sort_key(z: GaussianInt):
    return (z.norm(), z.re, z.im)


def residue_system(b: GaussianInt) -> GaussianDigitSystem:
    """Canonical digits: the Gaussian integers alpha*b + beta*ib, alpha, beta in [0, 1)."""
    b = GaussianInt.of(b)
    n = b.norm()
    if n < 2:
        raise ValueError("base must be neither zero nor a unit")
    xs = [0, b.re, -b.im, b.re - b.im]
    ys = [0, b.im, b.re, b.im + b.re]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            w = GaussianInt(x, y) * b.conj()
            if 0 <= w.re < n and 0 <= w.im < n:
                out.append(GaussianInt(x, y))
    return GaussianDigitSystem(b, tuple(sorted(out, key=_sort_key)))


def centered_residue_system(b: GaussianInt) -> GaussianDigitSystem:
    """Digits of least norm in each residue class (ties: larger re, then im)."""
    b = GaussianInt.of(b)
    best: dict[GaussianInt, GaussianInt] = {}
    r = isqrt(b.norm()) + 1
    for x in range(-r, r + 1):
        for y in range(-r, r + 1):
            z = GaussianInt(x, y)
            key = reduce_mod(z, b)
            cur = best.get(key)
            if cur is None or (z.norm(), -z.re, -z.im) < (cur.norm(), -cur.re, -cur.im):
                best[key] = z
    return GaussianDigitSystem(b, tuple(sorted(best.values(), key=_sort_key)))


def validate_digit_system(b: GaussianInt, digits: Iterable[GaussianInt]) -> bool:
    """True iff there are N(b) digits, pairwise incongruent mod b."""
    b = GaussianInt.of(b)
    ds = [GaussianInt.of(d) for d in digits]
    if b.norm() < 2 or len(ds) != b.norm():
        return False
    return len({reduce_mod(d, b) for d in ds}) == len(ds)


# ---------------------------------------------------------------------------
# expansions


@dataclass(frozen=True)
class GaussExpansion:
    z: GaussianInt
    base: GaussianInt
    u: Optional[GaussianInt]
    digits: tuple[GaussianInt, ...]  # r_0, r_1, ...
    trajectory: tuple[GaussianInt, ...]  # z_0 = z, z_1, ...
    cycle: Optional[tuple[GaussianInt, ...]] = None

    @property
    def k(self) -> int:
        return len(self.digits)

    @property
    def terminated(self) -> bool:
        return self.cycle is None

    def value(self) -> GaussianInt:
        if self.u is None:
            raise ValueError("a cycling walk has no value")
        acc = self.u
        for r in reversed(self.digits):
            acc = acc * self.base + r
        return acc

    def to_json(self) -> dict:
        return {
            "z": str(self.z),
            "base": str(self.base),
            "u": None if self.u is None else str(self.u),
            "k": self.k,
            "digits": [str(d) for d in self.digits],
            "trajectory": [str(t) for t in self.trajectory],
            "cycle": None if self.cycle is None else [str(c) for c in self.cycle],
        }


def _contracts(z: GaussianInt, r: GaussianInt, nxt: GaussianInt, b: GaussianInt) -> bool:
    # |z'| |b| <= |z| + |r|, squared without roots
    lhs = nxt.norm() * b.norm() - z.norm() - r.norm()
    return lhs <= 0 or lhs * lhs <= 4 * z.norm() * r.norm()


def gauss_expand(z: GaussianInt, sys: GaussianDigitSystem, stop: str = "unit",
                 max_steps: int = 100_000) -> GaussExpansion:
    """Euclidean digit walk z_{t+1} = (z_t - r_t)/b.

    ``stop="unit"`` halts when the quotient is 0 or a unit, ``stop="zero"``
    only at 0.  A revisited state ends the walk as a cycle.
    """
    z = GaussianInt.of(z)
    if stop not in ("unit", "zero"):
        raise ValueError("stop must be 'unit' or 'zero'")
    halt = {ZERO, *UNITS} if stop == "unit" else {ZERO}
    b = sys.base
    traj = [z]
    seen = {z: 0}
    digits = []
    cur = z
    for _ in range(max_steps):
        if cur in halt:
            return GaussExpansion(z, b, cur, tuple(digits), tuple(traj))
        r = sys.digit_for(cur)
        nxt = (cur - r).exact_div(b)
        assert _contracts(cur, r, nxt, b)
        digits.append(r)
        if nxt in seen:
            return GaussExpansion(z, b, None, tuple(digits), tuple(traj), tuple(traj[seen[nxt]:]))
        seen[nxt] = len(traj)
        traj.append(nxt)
        cur = nxt
    raise RuntimeError("digit walk exceeded max_steps")


def _digit_sums(b: GaussianInt, digits: Sequence[GaussianInt], K: int) -> list[set[tuple[int, int]]]:
    """Sets T_k of sums over digit strings of length exactly k, for k = 1..K."""
    ds = [(d.re, d.im) for d in digits]
    out = []
    level = {(0, 0)}
    p = ONE
    for _ in range(K):
        pr, pi = p.re, p.im
        level = {(x + dr * pr - di * pi, y + dr * pi + di * pr) for x, y in level for dr, di in ds}
        out.append(level)
        p = p * b
    return out


def enumerate_representable(sys: GaussianDigitSystem, digits: Optional[Sequence[GaussianInt]] = None,
                            max_digits: int = 1) -> set[GaussianInt]:
    """All sum_{j<k} r_j b**j with 1 <= k <= max_digits and r_j in ``digits``."""
    if max_digits < 1:
        raise ValueError("max_digits must be >= 1")
    digits = sys.digits if digits is None else [GaussianInt.of(d) for d in digits]
    out: set[tuple[int, int]] = set()
    for level in _digit_sums(sys.base, digits, max_digits):
        out |= level
    return {GaussianInt(x, y) for x, y in out}


# ---------------------------------------------------------------------------
# exact Gaussian rationals and cells


@dataclass(frozen=True)
class GaussQ:
    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, z) -> "GaussQ":
        if isinstance(z, GaussQ):
            return z
        z = GaussianInt.of(z)
        return cls(Fraction(z.re), Fraction(z.im))

    def __add__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def inverse(self) -> "GaussQ":
        n = self.re * self.re + self.im * self.im
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * GaussQ.of(o).inverse()

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def point(self) -> tuple[float, float]:
        return float(self.re), float(self.im)

    def __str__(self) -> str:
        from .numeric import fmt_q
        sign = "-" if self.im < 0 else "+"
        return f"{fmt_q(self.re)}{sign}{fmt_q(abs(self.im))}i"


def _cross(o: GaussQ, a: GaussQ, b: GaussQ) -> Fraction:
    return (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)


def convex_hull(points: Iterable[GaussQ]) -> tuple[GaussQ, ...]:
    """Exact convex hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(points), key=lambda p: (p.re, p.im))
    if len(pts) <= 2:
        return tuple(pts)
    lower: list[GaussQ] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[GaussQ] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


def hull_iterations(sys: GaussianDigitSystem, tolerance: float = 1e-3) -> int:
    """Iterations needed for |b|**-M <= tolerance."""
    import math
    return max(1, math.ceil(math.log(1 / tolerance) / (0.5 * math.log(sys.norm))))


def tile_hull(sys: GaussianDigitSystem, iterations: Optional[int] = None) -> tuple[GaussQ, ...]:
    """Inner approximation of the convex hull of the full-digit limit set.

    Starts from the fixed points d/(b-1) of the maps z -> (z+d)/b and applies
    H -> conv(union of (H+d)/b) ``iterations`` times.  Every vertex is a
    point of the limit set, and the Hausdorff distance to the true hull
    shrinks like |b|**-iterations.
    """
    if iterations is None:
        iterations = hull_iterations(sys)
    b = GaussQ.of(sys.base)
    inv = b.inverse()
    ds = [GaussQ.of(d) for d in sys.digits]
    hull = convex_hull(GaussQ.of(d) / (b - 1) for d in sys.digits)
    for _ in range(iterations):
        nxt = convex_hull((v + d) * inv for v in hull for d in ds)
        if nxt == hull:
            break
        hull = nxt
    return hull


@dataclass(frozen=True)
class Cell:
    """offset + rotation * shape, with rotation = b**-L exactly."""

    digits: tuple[GaussianInt, ...]  # r_1..r_L (r_1 is the coarsest)
    offset: GaussQ
    rotation: GaussQ
    shape: tuple[GaussQ, ...]

    @property
    def scale_squared(self) -> Fraction:
        return self.rotation.norm()

    @property
    def scale(self) -> float:
        return float(self.scale_squared) ** 0.5

    @property
    def center(self) -> GaussQ:
        n = len(self.shape)
        c = GaussQ(sum((v.re for v in self.shape), Fraction(0)) / n, sum((v.im for v in self.shape), Fraction(0)) / n)
        return self.offset + self.rotation * c

    def vertices(self) -> list[GaussQ]:
        return [self.offset + self.rotation * v for v in self.shape]

    def polygon(self) -> list[tuple[float, float]]:
        return [v.point() for v in self.vertices()]

    def to_json(self) -> dict:
        return {
            "digits": [str(d) for d in self.digits],
            "center": str(self.center),
            "rotation": str(self.rotation),
        }


def level_cells(sys: GaussianDigitSystem, digits: Optional[Sequence[GaussianInt]] = None,
                L: int = 1, shape: Optional[Sequence[GaussQ]] = None) -> list[Cell]:
    """The |D|**L cells sum_{t=1..L} r_t b**-t + b**-L * Hull.

    Hull defaults to :func:`tile_hull` of the full digit system, so cells for
    a sub-digit set are a sub-collection of the full cells.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    digits = sys.digits if digits is None else tuple(GaussianInt.of(d) for d in digits)
    shape = tile_hull(sys) if shape is None else tuple(shape)
    inv = GaussQ.of(sys.base).inverse()
    cells = [((), GaussQ.of(0), GaussQ.of(1))]
    for _ in range(L):
        nxt = []
        for ds, off, rot in cells:
            rot2 = rot * inv
            for d in digits:
                nxt.append((ds + (d,), off + rot2 * GaussQ.of(d), rot2))
        cells = nxt
    return [Cell(ds, off, rot, shape) for ds, off, rot in cells]


def _dist2_to_segment(p: GaussQ, a: GaussQ, b: GaussQ) -> Fraction:
    abx, aby = b.re - a.re, b.im - a.im
    apx, apy = p.re - a.re, p.im - a.im
    den = abx * abx + aby * aby
    t = Fraction(0) if den == 0 else min(Fraction(1), max(Fraction(0), (apx * abx + apy * aby) / den))
    dx, dy = apx - t * abx, apy - t * aby
    return dx * dx + dy * dy


def dist2_to_polygon(p: GaussQ, poly: Sequence[GaussQ]) -> Fraction:
    """Squared distance from p to a counter-clockwise convex polygon (0 inside)."""
    n = len(poly)
    if n >= 3 and all(_cross(poly[k], poly[(k + 1) % n], p) >= 0 for k in range(n)):
        return Fraction(0)
    return min(_dist2_to_segment(p, poly[k], poly[(k + 1) % n]) for k in range(n))


def nesting_defect(sys: GaussianDigitSystem, digits: Optional[Sequence[GaussianInt]] = None,
                   L: int = 1, shape: Optional[Sequence[GaussQ]] = None) -> Fraction:
    """Largest squared distance of a level-(L+1) cell vertex from its parent
    cell, in units of the parent size (0 means exact nesting)."""
    shape = tile_hull(sys) if shape is None else tuple(shape)
    parents = {c.digits: c for c in level_cells(sys, digits, L, shape)}
    worst = Fraction(0)
    for child in level_cells(sys, digits, L + 1, shape):
        parent = parents[child.digits[:-1]]
        inv = parent.rotation.inverse()
        for v in child.vertices():
            worst = max(worst, dist2_to_polygon((v - parent.offset) * inv, shape))
    return worst


def nesting_bound(sys: GaussianDigitSystem, iterations: Optional[int] = None) -> Fraction:
    """Upper bound for :func:`nesting_defect` with the default hull.

    Child vertices are points of the limit set, which lies within
    2 R |b|**-M of the M-step hull, R = max|d| / (|b| - 1).
    """
    if iterations is None:
        iterations = hull_iterations(sys)
    n = sys.norm
    root_lo = Fraction(isqrt(n * 10 ** 12), 10 ** 6)  # <= sqrt(N)
    r2 = Fraction(max(d.norm() for d in sys.digits)) / (root_lo - 1) ** 2
    return 4 * r2 / Fraction(n) ** iterations


@dataclass(frozen=True)
class TileCheck:
    fraction: float
    expected: float
    samples: int
    level: int

    def to_json(self) -> dict:
        return {"fraction": self.fraction, "expected": self.expected, "samples": self.samples, "level": self.level}


def fundamental_tile_check(sys: GaussianDigitSystem, L: int, samples: int = 4000,
                           digits: Optional[Sequence[GaussianInt]] = None, seed: int = 0,
                           bits: int = 40) -> TileCheck:
    """Fraction of random points of [0,1)^2 whose cell mod Z[i] has allowed digits.

    Points are dyadic rationals, so the cell lookup (floor of b**L p, then L
    digit steps) is exact.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    allowed = set(sys.digits if digits is None else (GaussianInt.of(d) for d in digits))
    rng = random.Random(seed)
    bL = sys.base ** L
    den = 1 << bits
    hits = 0
    for _ in range(samples):
        x, y = rng.getrandbits(bits), rng.getrandbits(bits)
        w = GaussianInt(x, y) * bL
        q = GaussianInt(w.re // den, w.im // den)
        ok = True
        for _ in range(L):
            r = sys.digit_for(q)
            if r not in allowed:
                ok = False
                break
            q = (q - r).exact_div(sys.base)
        hits += ok
    expected = (len(allowed) / sys.norm) ** L
    return TileCheck(hits / samples, expected, samples, L)


# ---------------------------------------------------------------------------
# thickness growth


def central_digit(sys: GaussianDigitSystem) -> GaussianInt:
    """The digit whose unit cell centre is nearest the centroid of all cells."""
    n = len(sys.digits)
    cx = Fraction(sum(d.re for d in sys.digits), n) + Fraction(1, 2)
    cy = Fraction(sum(d.im for d in sys.digits), n) + Fraction(1, 2)

    def key(d: GaussianInt):
        dx, dy = d.re + Fraction(1, 2) - cx, d.im + Fraction(1, 2) - cy
        return (dx * dx + dy * dy, d.norm(), d.re, d.im)

    return min(sys.digits, key=key)


@dataclass(frozen=True)
class GrowthRow:
    base: GaussianInt
    norm: int
    missing: GaussianInt
    estimate: float
    error: float

    @property
    def ratio(self) -> float:
        return self.estimate / self.norm ** 0.5

    def to_json(self) -> dict:
        return {
            "base": str(self.base),
            "norm": self.norm,
            "missing": str(self.missing),
            "estimate": self.estimate,
            "error": self.error,
            "ratio_to_sqrt_norm": self.ratio,
        }


def thickness_growth_scan(systems: Sequence[GaussianDigitSystem], level: int = 1,
                          resolution: int = 256) -> list[GrowthRow]:
    """2-D thickness estimates of level-L sets missing their central digit."""
    from .plane import thickness_2d_estimate

    rows = []
    for sys in systems:
        miss = central_digit(sys)
        cells = level_cells(sys, [d for d in sys.digits if d != miss], level)
        est = thickness_2d_estimate([c.polygon() for c in cells], resolution)
        rows.append(GrowthRow(sys.base, sys.norm, miss, est.value, est.error))
    rows.sort(key=lambda r: (r.norm, r.base.re, r.base.im))
    return rows


# ---------------------------------------------------------------------------
# alignment, pruning, common search


@dataclass(frozen=True)
class GaussAlignment:
    l1: int
    l2: int
    exact: bool  # b1**l1 == b2**l2
    error_squared: Fraction  # |b1**l1 / b2**l2 - 1|**2

    def to_json(self) -> dict:
        from .numeric import fmt_q
        return {"l1": self.l1, "l2": self.l2, "ratio_is_one": self.exact, "error_squared": fmt_q(self.error_squared)}


def _unit_order(u: GaussianInt) -> int:
    return {ONE: 1, -ONE: 2, I: 4, -I: 4}[u]


def gauss_alignment(b1: GaussianInt, b2: GaussianInt, eps: Fraction, bound: int = 64) -> GaussAlignment:
    """Smallest (l1 + l2, then l1) with |b1**l1 / b2**l2 - 1| < eps.

    The test N(b1**l1 - b2**l2) < eps**2 N(b2)**l2 is exact.  When b1 is a
    unit multiple of b2 the search is capped at the unit's order.
    """
    b1, b2 = GaussianInt.of(b1), GaussianInt.of(b2)
    eps = Fraction(eps)
    if b1.norm() < 2 or b2.norm() < 2:
        raise ValueError("bases must be neither zero nor units")
    if eps <= 0:
        raise ValueError("eps must be positive")
    cap = 2 * bound
    if b1.norm() == b2.norm() and b2.divides(b1):
        u = b1.exact_div(b2)
        cap = min(cap, 2 * _unit_order(u))
    e2 = eps * eps
    p1 = [ONE]
    p2 = [ONE]
    for _ in range(bound):
        p1.append(p1[-1] * b1)
        p2.append(p2[-1] * b2)
    for s in range(2, cap + 1):
        for l1 in range(max(1, s - bound), min(bound, s - 1) + 1):
            l2 = s - l1
            a, c = p1[l1], p2[l2]
            diff = (a - c).norm()
            if diff < e2 * c.norm():
                return GaussAlignment(l1, l2, diff == 0, Fraction(diff, c.norm()))
    from .fy import NotFound
    raise NotFound(f"no alignment with l1, l2 <= {bound} within eps = {eps}")


def small_digit_prune(sys: GaussianDigitSystem, eps: Fraction) -> tuple[tuple[GaussianInt, ...], int]:
    """Drop digits closer than eps*|b| to a corner of the fundamental parallelogram."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    b = sys.base
    corners = (ZERO, b, I * b, b + I * b)
    limit = eps * eps * b.norm()
    kept = tuple(d for d in sys.digits if all((d - c).norm() >= limit for c in corners))
    if not kept:
        raise ValueError("pruning removes every digit")
    return kept, len(sys.digits) - len(kept)


def _walk_ok(z: GaussianInt, sys: GaussianDigitSystem, missing: GaussianInt) -> bool:
    e = gauss_expand(z, sys)
    return e.terminated and e.u in (ZERO, ONE) and missing not in e.digits


def gauss_search_common(sys1: GaussianDigitSystem, sys2: GaussianDigitSystem,
                        missing1: GaussianInt, missing2: GaussianInt, max_digits: int) -> list[GaussianInt]:
    """Nonzero z = u b1**k + sum r_j b1**j (u in {0, 1}, k <= max_digits, no
    missing digit) whose unit-stopping walks in both systems end at u in
    {0, 1} without meeting the missing digit.  Sorted by (N, re, im)."""
    missing1, missing2 = GaussianInt.of(missing1), GaussianInt.of(missing2)
    if missing1 not in sys1.digits or missing2 not in sys2.digits:
        raise ValueError("the missing digit must belong to its digit system")
    allowed = [d for d in sys1.digits if d != missing1]
    cands: set[tuple[int, int]] = {(1, 0)}
    p = sys1.base
    for level in _digit_sums(sys1.base, allowed, max_digits):
        cands |= level
        cands |= {(x + p.re, y + p.im) for x, y in level}
        p = p * sys1.base
    out = []
    for x, y in cands:
        z = GaussianInt(x, y)
        if z != ZERO and _walk_ok(z, sys1, missing1) and _walk_ok(z, sys2, missing2):
            out.append(z)
    return sorted(out, key=_sort_key)


# ---------------------------------------------------------------------------
# rendering

_PALETTE = [
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40), (148, 103, 189),
    (140, 86, 75), (227, 119, 194), (127, 127, 127), (188, 189, 34), (23, 190, 207),
]


def _frame(points: list[tuple[float, float]], width: int, height: int):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    s = 0.9 * min(width, height) / span
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2

    def to_px(p):
        return width / 2 + (p[0] - cx) * s, height / 2 - (p[1] - cy) * s

    return to_px, s


def _color(i: Optional[int]) -> tuple[int, int, int]:
    return (0, 0, 0) if i is None else _PALETTE[i % len(_PALETTE)]


def render(items: Sequence[Union[Cell, GaussianInt]], path: Union[str, Path], size: tuple[int, int] = (512, 512),
           color_digits: bool = False, digit_order: Optional[Sequence[GaussianInt]] = None) -> Path:
    """Write cells (as polygons) or points to an SVG or binary PPM file.

    Output bytes depend only on the input and the options.  With
    ``color_digits`` a cell is colored by its finest digit.
    """
    if not items:
        raise ValueError("nothing to render")
    path = Path(path)
    kind = path.suffix.lower()
    if kind not in (".svg", ".ppm"):
        raise ValueError("output must end in .svg or .ppm")
    width, height = size
    if width < 1 or height < 1:
        raise ValueError("image size must be positive")
    is_cells = isinstance(items[0], Cell)
    if is_cells:
        shapes = [c.polygon() for c in items]
        order = {d: k for k, d in enumerate(digit_order or sorted({c.digits[-1] for c in items}, key=_sort_key))}
        colors = [_color(order[c.digits[-1]] if color_digits else None) for c in items]
    else:
        shapes = [[(float(GaussianInt.of(z).re), float(GaussianInt.of(z).im))] for z in items]
        colors = [_color(None)] * len(items)
    to_px, s = _frame([p for sh in shapes for p in sh], width, height)
    if kind == ".svg":
        data = _svg(shapes, colors, to_px, width, height, is_cells)
    else:
        data = _ppm(shapes, colors, to_px, width, height, is_cells)
    path.write_bytes(data)
    return path


def _svg(shapes, colors, to_px, width, height, is_cells) -> bytes:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for sh, (r, g, b) in zip(shapes, colors):
        fill = f"#{r:02x}{g:02x}{b:02x}"
        if is_cells:
            pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(to_px, sh))
            out.append(f'<polygon points="{pts}" fill="{fill}"/>')
        else:
            x, y = to_px(sh[0])
            out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="1" fill="{fill}"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()


def _ppm(shapes, colors, to_px, width, height, is_cells) -> bytes:
    import numpy as np

    img = np.full((height, width, 3), 255, dtype=np.uint8)
    ys, xs = np.mgrid[0:height, 0:width]
    px, py = xs + 0.5, ys + 0.5
    for sh, col in zip(shapes, colors):
        pts = [to_px(p) for p in sh]
        if not is_cells:
            x, y = pts[0]
            img[min(max(int(y), 0), height - 1), min(max(int(x), 0), width - 1)] = col
            continue
        x0 = max(int(min(p[0] for p in pts)), 0)
        x1 = min(int(max(p[0] for p in pts)) + 1, width)
        y0 = max(int(min(p[1] for p in pts)), 0)
        y1 = min(int(max(p[1] for p in pts)) + 1, height)
        if x0 >= x1 or y0 >= y1:
            continue
        sx, sy = px[y0:y1, x0:x1], py[y0:y1, x0:x1]
        inside = _inside_convex(pts, sx, sy)
        img[y0:y1, x0:x1][inside] = col
    header = f"P6\n{width} {height}\n255\n".encode()
    return header + img.tobytes()


def _inside_convex(pts, sx, sy):
    """Mask of sample points inside a convex polygon (either orientation)."""
    import numpy as np

    pos = np.ones(sx.shape, dtype=bool)
    neg = np.ones(sx.shape, dtype=bool)
    n = len(pts)
    for k in range(n):
        (ax, ay), (bx, by) = pts[k], pts[(k + 1) % n]
        cross = (bx - ax) * (sy - ay) - (by - ay) * (sx - ax)
        pos &= cross >= 0
        neg &= cross <= 0
    return pos | neg
