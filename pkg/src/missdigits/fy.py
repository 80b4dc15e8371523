"""Quantitative thickness-intersection checks for simultaneous missing digits.

This module evaluates the explicit constants of the intersection theorem,
solves the base threshold M(k), finds torus alignments n, builds the windows
of the missing-digit sets near b_1**(n+1), and assembles certificates.  All
comparisons that involve logarithms are made on rigorous enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Union

from . import numeric
from .cantor import INF, fmt_thickness, thickness_formula
from .expansions import MissingDigitSpec, avoids, expand_nat
from .numeric import (
    DEFAULT_BITS,
    Enclosure,
    Interval,
    LogEnclosure,
    Q,
    RationalLike,
    e_enclosure,
    exp_of,
    fmt_q,
    log_enclosure,
    log_ratio,
    sqrt_enclosure,
)

# 4 * 432**2 * e / log 4 is the per-set constant of the gauge
_GAUGE_FACTOR = 4 * 432 ** 2
DELTA = Fraction(1, 4)


class CertificationError(Exception):
    """A named condition of the certification pipeline failed."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class NotFound(LookupError):
    pass


def k2_constant(d: int) -> Fraction:
    """((24 sqrt d)**d (1 + 2*4**d) / (1 - 2**-d))**2, exactly.

    The square turns (sqrt d)**(2d) into d**d, so the value is rational.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    inner = Fraction(1 + 2 * 4 ** d) / (1 - Fraction(1, 2 ** d))
    return Fraction(576 ** d * d ** d) * inner * inner


def gauge_constant(k: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """k * 4e * 432**2 / log 4."""
    return (k * _GAUGE_FACTOR) * e_enclosure(bits) / log_enclosure(4, bits)


def gauge(k: int, x: RationalLike, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of g_k(x) = x/log x - k*4e*432**2/log 4 for x > 1."""
    x = Q(x)
    if x <= 1:
        raise ValueError("gauge needs x > 1")
    return x / log_enclosure(x, bits) - gauge_constant(k, bits)


def _gauge_sign(k: int, x: Fraction, bits: int, max_bits: int = 4096) -> tuple[int, Enclosure]:
    """Sign of g_k(x), tightening precision until the enclosure decides it.

    Returns 0 when undecided at ``max_bits`` (treated as not positive).
    """
    while True:
        g = gauge(k, x, bits)
        if g.lo > 0:
            return 1, g
        if g.hi < 0:
            return -1, g
        if bits >= max_bits:
            return 0, g
        bits *= 2


@dataclass(frozen=True)
class Threshold:
    k: int
    r: Fraction
    M: int
    gauge_at_M: Enclosure
    gauge_below: Optional[Enclosure]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "r": fmt_q(self.r),
            "M": self.M,
            "gauge_at_M": self.gauge_at_M.to_json(),
            "gauge_at_M_minus_1": None if self.gauge_below is None else self.gauge_below.to_json(),
        }


def solve_threshold_M(k: int, r: RationalLike = 1, bits: int = DEFAULT_BITS) -> Threshold:
    """Smallest M with g_k(r(M-2)) rigorously positive.

    The search is restricted to r(M-2) >= 3, where g_k is increasing, and to
    M >= 4.  Exponential bracketing is followed by bisection.
    """
    r = Q(r)
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0 < r <= 1:
        raise ValueError("r must lie in (0, 1]")

    def positive(m: int) -> bool:
        return _gauge_sign(k, r * (m - 2), bits)[0] > 0

    lo_m = max(4, numeric.ceil_q(2 + 3 / r))
    if positive(lo_m):
        hi = lo_m
    else:
        lo, hi = lo_m, 2 * lo_m
        while not positive(hi):
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if positive(mid):
                hi = mid
            else:
                lo = mid
    at = gauge(k, r * (hi - 2), bits)
    below = None
    if hi - 1 >= lo_m:
        below = _gauge_sign(k, r * (hi - 3), bits)[1]
    return Threshold(k, r, hi, at, below)


def c_for_thickness(tau: RationalLike, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of 1 - 1/log(tau/4), the exponent used with thickness tau."""
    tau = Q(tau)
    if tau <= 4:
        raise ValueError("need tau > 4e for an exponent in (0, 1)")
    lg = log_enclosure(tau / 4, bits)
    if lg.lo <= 1:
        raise ValueError(f"need tau > 4e for an exponent in (0, 1), got tau = {tau}")
    return 1 - 1 / lg


def choose_c(b_min: RationalLike, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of 1 - 1/log((b_min - 2)/4); requires b_min > 4e + 2."""
    return c_for_thickness(Q(b_min) - 2, bits)


def pick_rational(e: Enclosure, max_bits: int = 1024) -> Fraction:
    """The dyadic rational with the fewest bits inside an enclosure."""
    for k in range(max_bits):
        x = Fraction(numeric.ceil_q(e.lo * (1 << k)), 1 << k)
        if x <= e.hi:
            return x
    return e.mid


# ---------------------------------------------------------------------------
# the intersection theorem


Box = Union[Interval, Sequence[Interval]]


def _box(b: Box) -> tuple[Interval, ...]:
    return (b,) if isinstance(b, Interval) else tuple(b)


def box_diameter(b: Box, bits: int = DEFAULT_BITS) -> Enclosure:
    sides = _box(b)
    if len(sides) == 1:
        return Enclosure.exact(sides[0].length)
    return sqrt_enclosure(sum((s.length ** 2 for s in sides), Fraction(0)), bits)


@dataclass(frozen=True)
class FYSet:
    thickness: Union[Fraction, float]
    diameter: Fraction
    hull: Box


@dataclass(frozen=True)
class FYInstance:
    dimension: int
    sets: tuple[FYSet, ...]
    ball: Box
    c: Fraction

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.sets:
            raise ValueError("at least one set is needed")
        if any(not s.thickness > 0 for s in self.sets):
            raise ValueError("every thickness must be positive")
        if not 0 < self.c < self.dimension:
            raise ValueError("c must lie in (0, d)")


@dataclass
class Condition:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class FYCertificate:
    instance: FYInstance
    K2: Fraction
    beta: Optional[Enclosure]
    lhs: Optional[Enclosure]
    rhs: Optional[Enclosure]
    conditions: list[Condition]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.conditions)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def margin(self) -> Optional[Fraction]:
        if self.lhs is None or self.rhs is None:
            return None
        return self.rhs.lo - self.lhs.hi

    @property
    def failing(self) -> Optional[str]:
        return next((c.name for c in self.conditions if not c.ok), None)

    def to_json(self) -> dict:
        inst = self.instance
        return {
            "dimension": inst.dimension,
            "c": fmt_q(inst.c),
            "K2": fmt_q(self.K2),
            "beta": None if self.beta is None else self.beta.to_json(),
            "sets": [
                {
                    "thickness": fmt_thickness(s.thickness),
                    "diameter": fmt_q(s.diameter),
                    "hull": [iv.to_json() for iv in _box(s.hull)],
                }
                for s in inst.sets
            ],
            "ball": [iv.to_json() for iv in _box(inst.ball)],
            "lhs": None if self.lhs is None else self.lhs.to_json(),
            "rhs": None if self.rhs is None else self.rhs.to_json(),
            "margin": None if self.margin is None else fmt_q(self.margin),
            "conditions": [c.to_json() for c in self.conditions],
            "verdict": self.verdict,
            "failing_condition": self.failing,
        }


def check_fy(instance: FYInstance, bits: int = DEFAULT_BITS) -> FYCertificate:
    """Evaluate the three hypotheses of the intersection theorem.

    Condition (3) passes only if the upper end of the enclosure of
    sum tau_i**-c is at most the lower end of that of
    (1/K2) beta**c (1 - beta**(1-c)); raising the precision can therefore
    never turn a pass into a fail.
    """
    d = instance.dimension
    K2 = k2_constant(d)
    conds: list[Condition] = []
    sup_diam = max(s.diameter for s in instance.sets)
    conds.append(Condition("condition-1", True, f"sup diameter {fmt_q(sup_diam)}"))

    ball = _box(instance.ball)
    bad = [
        i for i, s in enumerate(instance.sets)
        if len(_box(s.hull)) != len(ball)
        or not all(h.contains_interval(b) for h, b in zip(_box(s.hull), ball))
    ]
    if bad:
        conds.append(Condition("condition-2", False, f"ball not inside the hull of set(s) {bad}"))
        return FYCertificate(instance, K2, None, None, None, conds)
    conds.append(Condition("condition-2", True, "ball inside every hull"))

    c = Enclosure.exact(instance.c)
    diam_b = box_diameter(instance.ball, bits)
    ratio = diam_b / sup_diam if sup_diam > 0 else Enclosure.exact(Fraction(1, 4))
    beta = Enclosure(min(ratio.lo, Fraction(1, 4)), min(ratio.hi, Fraction(1, 4)))
    if beta.lo <= 0:
        conds.append(Condition("condition-3", False, "ball has zero diameter"))
        return FYCertificate(instance, K2, beta, None, None, conds)

    lhs = Enclosure.exact(0)
    for s in instance.sets:
        if s.thickness == INF:
            continue
        lhs = lhs + exp_of(-c * log_enclosure(s.thickness, bits), bits)

    # beta**c (1 - beta**(1-c)) = beta**c - beta is concave in beta, so its
    # minimum over the beta enclosure sits at an endpoint
    def rhs_at(bv: Fraction) -> Enclosure:
        return (exp_of(c * log_enclosure(bv, bits), bits) - bv) / K2

    r_lo, r_hi = rhs_at(beta.lo), rhs_at(beta.hi)
    rhs = Enclosure(min(r_lo.lo, r_hi.lo), max(r_lo.hi, r_hi.hi))
    ok = lhs.hi <= rhs.lo
    conds.append(Condition(
        "condition-3", ok,
        f"sum tau^-c <= {float(lhs.hi):.6e}, bound >= {float(rhs.lo):.6e}",
    ))
    return FYCertificate(instance, K2, beta, lhs, rhs, conds)


# ---------------------------------------------------------------------------
# torus alignment


@dataclass(frozen=True)
class AlignmentProblem:
    bases: tuple[int, ...]
    eps: Fraction
    n_max: int = 100_000

    def __post_init__(self):
        bases = tuple(sorted(self.bases))
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "eps", Q(self.eps))
        if len(bases) < 2:
            raise ValueError("alignment needs at least two bases")
        if len(set(bases)) != len(bases):
            raise ValueError("bases must be distinct")
        if bases[0] < 2:
            raise ValueError("bases must be >= 2")
        if not 0 < self.eps < Fraction(1, 2):
            raise ValueError("eps must lie in (0, 1/2)")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    def rotation(self, precision: RationalLike) -> list[LogEnclosure]:
        """Enclosures of log base b_i of b_1 for i >= 2."""
        b1 = self.bases[0]
        return [log_ratio(b, b1, precision) for b in self.bases[1:]]


@dataclass(frozen=True)
class Alignment:
    n: int
    exponents: tuple[int, ...]  # nearest integers to n log_{b_i} b_1 (b_1 itself: n)
    distances: tuple[Enclosure, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "exponents": list(self.exponents),
            "distances": [d.to_json() for d in self.distances],
        }


class _Rotation:
    """One component of the rotation vector in integer form for fast scans."""

    def __init__(self, b_i: int, b_1: int, precision: Fraction):
        self.b_i, self.b_1 = b_i, b_1
        self.set(log_ratio(b_i, b_1, precision))

    def set(self, enc: LogEnclosure):
        self.enc = enc
        unit = enc.lo.denominator * enc.hi.denominator // gcd(enc.lo.denominator, enc.hi.denominator)
        self.unit = unit
        self.A = enc.lo.numerator * (unit // enc.lo.denominator)
        self.B = enc.hi.numerator * (unit // enc.hi.denominator)

    def tighten(self):
        self.set(log_ratio(self.b_i, self.b_1, self.enc.width / (1 << 32)))

    def decide(self, n: int, en: int, ed: int) -> Optional[bool]:
        """Is dist(n*w, Z) < en/ed?  None when the enclosure cannot tell."""
        u = self.unit
        ylo, yhi = n * self.A, n * self.B
        m = (2 * ylo + u) // (2 * u)
        if (m * ed - en) * u < ylo * ed and yhi * ed < (m * ed + en) * u:
            return True
        m0 = ylo // u
        if ylo * ed >= (m0 * ed + en) * u and yhi * ed <= ((m0 + 1) * ed - en) * u:
            return False
        return None

    def distance(self, n: int) -> Enclosure:
        y = Enclosure(n * self.enc.lo, n * self.enc.hi)
        m = numeric.floor_q(y.mid + Fraction(1, 2))
        lo = max(Fraction(0), min(abs(y.lo - m), abs(y.hi - m)) if not y.contains(m) else Fraction(0))
        hi = max(abs(y.lo - m), abs(y.hi - m))
        return Enclosure(lo, hi)


def _decide(rot: _Rotation, n: int, en: int, ed: int, max_rounds: int = 16) -> bool:
    for _ in range(max_rounds):
        ans = rot.decide(n, en, ed)
        if ans is not None:
            return ans
        rot.tighten()
    raise ArithmeticError(f"could not decide the alignment test at n = {n}")


def nearest_exponent(b_i: int, b_1: int, n: int) -> int:
    """Nearest integer to n * log_{b_i}(b_1), by exact power comparisons."""
    target = b_1 ** n
    e = max(0, int(n * (b_1.bit_length() - 1) / b_i.bit_length()) - 1)
    while b_i ** (e + 1) <= target:
        e += 1
    while e > 0 and b_i ** e > target:
        e -= 1
    # t = n log_{b_i} b_1 in [e, e+1); round up iff t > e + 1/2
    return e + 1 if b_i ** (2 * e + 1) < target * target else e


def find_alignment(p: AlignmentProblem) -> Alignment:
    """Smallest n in [1, n_max] with every {n log_{b_i} b_1} within eps of Z."""
    b1 = p.bases[0]
    rots = [_Rotation(b, b1, p.eps / (8 * p.n_max)) for b in p.bases[1:]]
    en, ed = p.eps.numerator, p.eps.denominator
    for n in range(1, p.n_max + 1):
        if all(_decide(rot, n, en, ed) for rot in rots):
            exps = (n,) + tuple(nearest_exponent(b, b1, n) for b in p.bases[1:])
            return Alignment(n, exps, tuple(rot.distance(n) for rot in rots))
    raise NotFound(f"no n <= {p.n_max} aligns bases {list(p.bases)} within {p.eps}")


def is_aligned(p: AlignmentProblem, n: int) -> bool:
    b1 = p.bases[0]
    en, ed = p.eps.numerator, p.eps.denominator
    return all(_decide(_Rotation(b, b1, p.eps / (8 * n)), n, en, ed) for b in p.bases[1:])


def safe_eps(bases: Sequence[int], delta: Fraction = DELTA, bits: int = 64) -> Fraction:
    """A rational eps < |log(1 - delta)| / log(max base), capped below 1/2."""
    e = log_enclosure(1 / (1 - delta), bits) / log_enclosure(max(bases), bits)
    eps = Fraction(numeric.floor_q(e.lo * (1 << 40)) - 1, 1 << 40)
    return min(eps, Fraction(1, 2) - Fraction(1, 1 << 40))


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class Window:
    index: int
    base: int
    n: int
    exponent: int
    v: Fraction
    left: Fraction
    right: Fraction
    cut: str  # "gap" or "hull-end"
    missing: frozenset[int] = frozenset({0})

    @property
    def hull(self) -> Interval:
        return Interval(self.left, self.right)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "base": self.base,
            "n": self.n,
            "exponent": self.exponent,
            "v": fmt_q(self.v),
            "L": fmt_q(self.left),
            "R": fmt_q(self.right),
            "cut": self.cut,
        }


def first_level_cut_points(spec: MissingDigitSpec) -> tuple[list[Fraction], Optional[tuple[Fraction, Fraction, int]]]:
    """Left endpoints of the largest first-level gaps of C_{b,D} in [0, 1].

    Returned as an explicit list when the longest gaps come from missing
    digits, or as an arithmetic progression (start, step, count) when every
    first-level gap has the same length (no two allowed digits further than
    one apart), which avoids listing b points for huge bases.
    """
    b = spec.base
    allowed = spec.allowed
    dmin, dmax = allowed.lowest, allowed.highest
    tail = Fraction(dmax, b * (b - 1))
    missing = sorted(spec.missing)
    # maximal runs of missing digits strictly between allowed digits
    runs = []
    for m in missing:
        if runs and runs[-1][1] == m - 1:
            runs[-1][1] = m
        else:
            runs.append([m, m])
    inner = [(lo, hi) for lo, hi in runs if lo > dmin and hi < dmax]
    if not inner:
        # all spacings are 1: pieces c = dmin..dmax-1, cut at c/b + tail
        return [], (Fraction(dmin, b) + tail, Fraction(1, b), len(allowed) - 1)
    longest = max(hi - lo for lo, hi in inner)
    cuts = [Fraction(lo - 1, b) + tail for lo, hi in inner if hi - lo == longest]
    return cuts, None


def _nearest_cut(spec: MissingDigitSpec, scale: Fraction, target: Fraction) -> Fraction:
    cuts, prog = first_level_cut_points(spec)
    if prog is not None:
        start, step, count = prog
        if count <= 0:
            raise CertificationError("windows", "set has no first-level gap")
        t = (target / scale - start) / step
        k0 = numeric.floor_q(t)
        cands = [k for k in (k0, k0 + 1) if 0 <= k < count] or [0 if k0 < 0 else count - 1]
        cuts = [start + k * step for k in cands]
    return min((c * scale for c in cuts), key=lambda x: (abs(x - target), x))


def build_windows(
    bases: Sequence[int],
    n: int,
    specs: Optional[Sequence[MissingDigitSpec]] = None,
    check: bool = True,
) -> list[Window]:
    """Windows [L_i, R_i] of the base-b_i sets near b_1**(n+1).

    For base b_i the set is b_i**(e_i+1) C_{b_i,D_i} with e_i the nearest
    integer to n log_{b_i} b_1, so v_i = b_i**e_i / b_1**n is close to 1.
    The right end is cut at the left endpoint of a largest first-level gap
    closest to b_1**(n+1), or kept at the hull end if that is closer.
    """
    order = sorted(range(len(bases)), key=lambda i: bases[i])
    bases = [bases[i] for i in order]
    if specs is None:
        specs = [MissingDigitSpec.zero_free(b) for b in bases]
    else:
        specs = [specs[i] for i in order]
    b1 = bases[0]
    unit = b1 ** n
    target = Fraction(b1 * unit)
    out = []
    for idx, (b, spec) in enumerate(zip(bases, specs)):
        e = n if idx == 0 else nearest_exponent(b, b1, n)
        v = Fraction(b ** e, unit)
        scale = Fraction(b ** (e + 1))
        lo = scale * Fraction(spec.allowed.lowest, b - 1)
        hull_end = scale * Fraction(spec.allowed.highest, b - 1)
        cut = _nearest_cut(spec, scale, target)
        if (abs(hull_end - target), hull_end) < (abs(cut - target), cut):
            right, kind = hull_end, "hull-end"
        else:
            right, kind = cut, "gap"
        w = Window(idx + 1, b, n, e, v, lo, right, kind, spec.missing)
        if check:
            _check_window(w, b1)
        out.append(w)
    return out


def _check_window(w: Window, b1: int):
    unit = b1 ** w.n
    if not w.v > 1 - DELTA:
        raise CertificationError("windows", f"base {w.base}: v = {w.v} <= 3/4, alignment too coarse")
    if abs(w.right - b1 * unit) > Fraction(unit, 2):
        raise CertificationError("windows", f"base {w.base}: R = {w.right} farther than b1^n/2 from b1^(n+1)")
    if w.left > Fraction(4 * unit, 3):
        raise CertificationError("windows", f"base {w.base}: L = {w.left} exceeds (4/3) b1^n")
    if w.left >= w.right:
        raise CertificationError("windows", f"base {w.base}: empty window")


def common_ball(windows: Sequence[Window]) -> Optional[Interval]:
    lo = max(w.left for w in windows)
    hi = min(w.right for w in windows)
    return Interval(lo, hi) if lo <= hi else None


# ---------------------------------------------------------------------------
# end-to-end certificates


@dataclass
class CommonCertificate:
    bases: tuple[int, ...]
    specs: tuple[MissingDigitSpec, ...]
    threshold: Optional[Threshold]
    eps: Optional[Fraction]
    alignment: Optional[Alignment]
    windows: list[Window]
    fy: Optional[FYCertificate]
    conditions: list[Condition]
    notes: list[str] = field(default_factory=list)
    witness: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.conditions)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def failing(self) -> Optional[str]:
        return next((c.name for c in self.conditions if not c.ok), None)

    def to_json(self) -> dict:
        out = {
            "bases": list(self.bases),
            "missing": [sorted(s.missing) for s in self.specs],
            "r": [fmt_q(s.r) for s in self.specs],
            "threshold": None if self.threshold is None else self.threshold.to_json(),
            "eps": None if self.eps is None else fmt_q(self.eps),
            "alignment": None if self.alignment is None else self.alignment.to_json(),
            "windows": [w.to_json() for w in self.windows],
            "fy": None if self.fy is None else self.fy.to_json(),
            "conditions": [c.to_json() for c in self.conditions],
            "notes": list(self.notes),
            "verdict": self.verdict,
            "failing_condition": self.failing,
            "margin": None if self.fy is None or self.fy.margin is None else fmt_q(self.fy.margin),
        }
        if self.witness is not None:
            out["witness"] = {
                "value": str(self.witness),
                "digits": {
                    str(b): expand_nat(self.witness, b).msf() for b in self.bases
                },
            }
        return out


def certify_common_integer(
    bases: Sequence[int],
    missing: Optional[Sequence[frozenset]] = None,
    n: Optional[int] = None,
    witness: bool = False,
    n_max: int = 10_000,
    bits: int = DEFAULT_BITS,
) -> CommonCertificate:
    """Certify that the bases admit common missing-digit integers near b_1**(n+1).

    Every stage is recorded as a named condition; on the first failure the
    remaining stages are skipped and the certificate is returned with a fail
    verdict.  The witness search is best effort and does not affect the
    verdict.
    """
    from .search import first_common_in_range

    if missing is None:
        missing = [frozenset({0})] * len(bases)
    if len(missing) != len(bases):
        raise ValueError("one missing-digit set per base is required")
    if len(set(bases)) != len(bases) or len(bases) < 2:
        raise ValueError("need at least two distinct bases")
    pairs = sorted(zip(bases, missing))
    bases_t = tuple(b for b, _ in pairs)
    notes: list[str] = []
    conds: list[Condition] = []
    specs = []
    for b, m in pairs:
        s = MissingDigitSpec(b, frozenset(m))
        if not s.structured and s.corollary_ok:
            notes.append(f"base {b}: 0 added to the missing digits (corollary reduction)")
            s = s.with_zero_missing()
        specs.append(s)
    specs_t = tuple(specs)
    cert = CommonCertificate(bases_t, specs_t, None, None, None, [], None, conds, notes)

    bad = [s.base for s in specs if not s.structured]
    if bad:
        conds.append(Condition("structure", False, f"bases {bad} lack the run structure"))
        return cert
    conds.append(Condition("structure", True, "all digit sets structured"))
    taus = [thickness_formula(s).value for s in specs]

    r = min(s.r for s in specs)
    cert.threshold = solve_threshold_M(len(bases_t), r, bits)
    meets = bases_t[0] >= cert.threshold.M
    notes.append(f"threshold M = {cert.threshold.M}; bases {'meet' if meets else 'are below'} it")

    cert.eps = eps = safe_eps(bases_t)
    prob = AlignmentProblem(bases_t, eps, max(n_max, n or 1))
    try:
        if n is None:
            cert.alignment = find_alignment(prob)
        elif is_aligned(prob, n):
            b1 = bases_t[0]
            rots = [_Rotation(b, b1, eps / (8 * n)) for b in bases_t[1:]]
            cert.alignment = Alignment(
                n, (n,) + tuple(nearest_exponent(b, b1, n) for b in bases_t[1:]),
                tuple(rot.distance(n) for rot in rots),
            )
        else:
            raise NotFound(f"n = {n} is not aligned within eps = {eps}")
    except NotFound as exc:
        conds.append(Condition("alignment", False, str(exc)))
        return cert
    conds.append(Condition("alignment", True, f"n = {cert.alignment.n}"))

    try:
        cert.windows = build_windows(bases_t, cert.alignment.n, specs_t)
    except CertificationError as exc:
        cert.windows = build_windows(bases_t, cert.alignment.n, specs_t, check=False)
        conds.append(Condition("windows", False, str(exc)))
        return cert
    conds.append(Condition("windows", True, "window bounds hold"))

    ball = common_ball(cert.windows)
    if ball is None:
        conds.append(Condition("common-ball", False, "window hulls do not overlap"))
        return cert
    conds.append(Condition("common-ball", True, f"length {fmt_q(ball.length)}"))

    try:
        c = pick_rational(c_for_thickness(min(taus), bits))
    except ValueError:
        c = Fraction(1, 2)
        notes.append("thickness too small for the exponent rule; using c = 1/2")
    instance = FYInstance(
        1,
        tuple(FYSet(t, w.right - w.left, w.hull) for t, w in zip(taus, cert.windows)),
        ball,
        c,
    )
    cert.fy = check_fy(instance, bits)
    for cond in cert.fy.conditions:
        conds.append(cond)
    if cert.fy.passed and witness:
        x = first_common_in_range(specs_t, numeric.ceil_q(ball.lo), numeric.floor_q(ball.hi))
        if x is not None and all(avoids(x, s) for s in specs_t):
            cert.witness = x
        else:
            notes.append("no witness integer found in the common ball")
    return cert
