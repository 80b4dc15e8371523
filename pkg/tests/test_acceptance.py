"""Acceptance checks, one per criterion, each printing a PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -v -s``) or directly
(``python tests/test_acceptance.py``).
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory

import mpmath
import pytest

from missdigits.cantor import LevelSetSpec, check_formula, level_set, middle_cantor, thickness_exact
from missdigits.expansions import MissingDigitSpec, avoids, expand_nat
from missdigits.fy import (
    AlignmentProblem,
    build_windows,
    certify_common_integer,
    common_ball,
    find_alignment,
    gauge,
    k2_constant,
    safe_eps,
    solve_threshold_M,
)
from missdigits.gaussian import (
    ONE,
    ZERO,
    GaussianDigitSystem,
    GaussianInt,
    central_digit,
    centered_residue_system,
    enumerate_representable,
    gauss_alignment,
    gauss_expand,
    level_cells,
    render,
    residue_system,
    validate_digit_system,
)
from missdigits.plane import thickness_2d_estimate
from missdigits.search import SearchQuery, search_common

mpmath.mp.prec = 300
G = GaussianInt


class Check:
    """Collects named sub-checks so a failing line says what broke."""

    def __init__(self):
        self.failed: list[str] = []
        self.notes: list[str] = []

    def __call__(self, ok: bool, what: str):
        if not ok:
            self.failed.append(what)

    def note(self, text: str):
        self.notes.append(text)


def criterion_1(c: Check):
    for b in (4, 5, 10, 37):
        for depth in (1, 2, 3):
            t = thickness_exact(level_set(LevelSetSpec(MissingDigitSpec.zero_free(b), 0, depth)))
            c(t == b - 2, f"b={b} L={depth} gave {t}")
    return 1.0


def criterion_2(c: Check):
    for eps in (Fraction(1, 3), Fraction(1, 5), Fraction(1, 2)):
        for depth in (1, 2, 3, 4):
            t = thickness_exact(middle_cantor(eps, depth))
            c(t == (1 - eps) / (2 * eps), f"eps={eps} L={depth} gave {t}")
    c(thickness_exact(middle_cantor(Fraction(1, 3), 3)) == 1, "middle thirds")
    return None


STRUCTURED = [
    (10, {0, 5}), (10, {0}), (12, {0, 4, 8}), (7, {0, 3}), (16, {0, 5, 10}), (11, {0, 6}),
    (9, {0, 2}), (13, {0, 7}), (20, {0, 10}), (15, {0, 3, 9}), (8, {0, 4}), (6, {0, 2}),
]


def criterion_3(c: Check):
    checked = 0
    for b, missing in STRUCTURED:
        spec = MissingDigitSpec(b, frozenset(missing))
        c(spec.structured, f"b={b} D^c={sorted(missing)} not structured")
        for depth in (1, 2, 3):
            first = check_formula(spec, depth)
            if not first.agrees:
                again = check_formula(spec, depth)
                reproducible = first.evidence is not None and first.to_json() == again.to_json()
                c(reproducible, f"b={b} L={depth}: discrepancy without reproducible evidence")
                c.note(f"discrepancy b={b} L={depth}: exact {first.exact} vs formula {first.formula.value}")
            checked += 1
    c(len(STRUCTURED) >= 10, "fewer than 10 specs")
    c.note(f"{checked} level sets compared")
    return None


def criterion_4(c: Check):
    c(k2_constant(1) == 186624, "K2(1)")
    g = gauge(3, 79904624)
    c(g.lo > 0, "g_3(79904624) not rigorously positive")
    x = mpmath.mpf(79904624)
    c(x / mpmath.log(x) > 3 * 4 * mpmath.e * 432**2 / mpmath.log(4), "oracle disagrees on g_3(79904624)")
    th = solve_threshold_M(3, 1)
    c(th.M <= 79904626, f"M* = {th.M}")
    c(th.gauge_below is not None and th.gauge_below.lo <= 0, "g_3(M*-3) not <= 0")
    y = mpmath.mpf(th.M - 3)
    c(y / mpmath.log(y) <= 3 * 4 * mpmath.e * 432**2 / mpmath.log(4), "oracle: g_3(M*-3) > 0")
    c.note(f"M* = {th.M}")
    return 1.0


def criterion_5(c: Check):
    for eps in (Fraction(1, 3), Fraction(1, 100), Fraction(1, 10**15)):
        n = find_alignment(AlignmentProblem((2, 4), eps)).n
        c(n == 2, f"(2,4) eps={eps} gave {n}")
    a = find_alignment(AlignmentProblem((2, 3), Fraction(1, 100)))
    c(a.n == 84, f"(2,3) gave {a.n}")
    w = mpmath.log(2) / mpmath.log(3)
    bad = [n for n in range(1, 84) if abs(n * w - mpmath.nint(n * w)) < mpmath.mpf(1) / 100]
    c(not bad, f"rescan found aligned n < 84: {bad}")
    return 1.0


def criterion_6(c: Check):
    M = solve_threshold_M(2, 1).M
    bases = (M, M + 1)
    al = find_alignment(AlignmentProblem(bases, safe_eps(bases), 10))
    c(al.n == 1, f"alignment n = {al.n}")
    b1 = bases[0]
    windows = build_windows(bases, 1)
    for w in windows:
        c(abs(w.right - b1**2) <= Fraction(b1, 2), f"base {w.base}: |R - b1^2| too large")
    ball = common_ball(windows)
    c(ball is not None, "no common ball")
    if ball is not None:
        ratio = ball.length / max(w.right - w.left for w in windows)
        c(ratio >= Fraction(13, 27), f"ball ratio {float(ratio):.4f} < 13/27")
    cert = certify_common_integer(bases, n=1, witness=True)
    c(cert.fy is not None and cert.fy.passed, f"check_fy: {cert.failing}")
    x = cert.witness
    c(x is not None, "no witness")
    if x is not None:
        c(ball.lo <= x <= ball.hi, "witness outside the common ball")
        for s in cert.specs:
            c(avoids(x, s), f"witness has a 0 digit in base {s.base}")
            c(len(expand_nat(x, s.base).digits) == 2, f"witness not 2-digit in base {s.base}")
        c.note(f"M* = {M}, witness {x}")
    return 10.0


def criterion_7(c: Check):
    zf = MissingDigitSpec.zero_free
    got = list(search_common(SearchQuery((zf(3), zf(4)), first=5)))
    naive = [n for n in range(1, 1000) if avoids(n, zf(3)) and avoids(n, zf(4))][:5]
    c(got == [1, 2, 5, 7, 13] == naive, f"(3,4) gave {got}, scan {naive}")
    got = list(search_common(SearchQuery((zf(2), zf(3)), first=3)))
    naive = [n for n in range(1, 10**5 + 1) if avoids(n, zf(2)) and avoids(n, zf(3))][:3]
    mersenne = [2**k - 1 for k in range(1, 16) if avoids(2**k - 1, zf(3))][:3]
    c(got == [1, 7, 32767] == naive == mersenne, f"(2,3) gave {got}, scan {naive}, 2^k-1 {mersenne}")
    return 5.0


def _state_bound_ok(e, sys) -> bool:
    """Every state stays within max(|z|, R), R = max|r| / (|b| - 1)."""
    rb = math.sqrt(sys.norm)
    R = math.sqrt(max(d.norm() for d in sys.digits)) / (rb - 1)
    cap = max(math.sqrt(e.z.norm()), R) + 1e-9
    return all(math.sqrt(t.norm()) <= cap for t in e.trajectory)


def criterion_8(c: Check):
    binary = GaussianDigitSystem(G(-1, 1), (ZERO, ONE))
    for x in range(-20, 21):
        for y in range(-20, 21):
            z = G(x, y)
            e = gauss_expand(z, binary, stop="zero")
            if not (e.terminated and e.u == ZERO and e.value() == z):
                c(False, f"base -1+i failed at {z}")
    canon = residue_system(G(1, 2))
    cycles = 0
    for x in range(-20, 21):
        for y in range(-20, 21):
            z = G(x, y)
            e = gauss_expand(z, canon)
            c(_state_bound_ok(e, canon), f"state escaped the norm bound at {z}")
            if e.terminated:
                c(e.value() == z, f"round trip failed at {z}")
            else:
                cycles += 1
    c.note(f"1+2i: {cycles} cycling starts")
    return 10.0


def _parallelogram_points(b):
    r = 2 * int(math.isqrt(b.norm())) + 2
    out = set()
    for x in range(-r, r + 1):
        for y in range(-r, r + 1):
            det = b.norm()
            alpha = Fraction(x * b.re + y * b.im, det)
            beta = Fraction(y * b.re - x * b.im, det)
            if 0 <= alpha < 1 and 0 <= beta < 1:
                out.add(G(x, y))
    return out


def criterion_9(c: Check):
    b = G(1, 2)
    got = set(residue_system(b).digits)
    want = {ZERO, G(0, 1), G(0, 2), G(-1, 1), G(-1, 2)}
    c(got == want == _parallelogram_points(b), f"residue_system(1+2i) = {sorted(map(str, got))}")
    c(validate_digit_system(b, [ZERO, ONE, G(2), G(1, 1), G(2, 1)]), "{0,1,2,1+i,2+i} rejected")
    return None


def criterion_10(c: Check):
    a = gauss_alignment(G(1, 2), G(2, -1), Fraction(1, 10**6))
    c((a.l1, a.l2) == (4, 4), f"got ({a.l1}, {a.l2})")
    c(a.exact and a.error_squared == 0, "ratio is not exactly 1")
    c(G(1, 2) ** 4 == G(2, -1) ** 4, "powers differ")
    return None


def criterion_11(c: Check):
    for b in (G(1, 1), G(1, 2), G(2)):
        sys = residue_system(b)
        for L in range(1, 5):
            n = len(level_cells(sys, sys.digits[1:], L))
            c(n == (len(sys.digits) - 1) ** L, f"{b} L={L}: {n} cells")
    sys = residue_system(G(1, 2))
    cells = level_cells(sys, sys.digits[1:], 3)
    with TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for suffix in ("svg", "ppm"):
            a = render(cells, tmp / f"a.{suffix}", (256, 256), color_digits=True).read_bytes()
            b = render(cells, tmp / f"b.{suffix}", (256, 256), color_digits=True).read_bytes()
            c(a == b, f"{suffix} output differs between runs")
        pts = enumerate_representable(GaussianDigitSystem(G(1, 1), (ZERO, ONE)), max_digits=15)
        svg = render(sorted(pts), tmp / "cloud.svg", (512, 512)).read_bytes()
        c(svg.count(b"<circle") == len(pts), "point cloud size differs from the enumeration")
        c.note(f"{len(pts)} points")
    return None


GROWTH_BASES = [G(1, 2), G(3), G(2, 3), G(4)]


def criterion_12(c: Check):
    rows = []
    for b in GROWTH_BASES:
        sys = centered_residue_system(b)
        miss = central_digit(sys)
        polys = [cell.polygon() for cell in level_cells(sys, [d for d in sys.digits if d != miss], 1)]
        lo, hi = thickness_2d_estimate(polys, 256), thickness_2d_estimate(polys, 512)
        rows.append((sys.norm, lo.value, hi.value))
        c(0 < lo.value and 0 < hi.value, f"N={sys.norm}: non-positive estimate")
        c(abs(hi.value - lo.value) <= 0.1 * hi.value, f"N={sys.norm}: unstable under doubling")
    values = [r[2] for r in rows]
    for (n1, _, v1), (n2, _, v2) in zip(rows, rows[1:]):
        c(v1 <= v2, f"not monotone: N={n1} gives {v1:.4f} > N={n2} gives {v2:.4f}")
    c.note("estimates " + ", ".join(f"N={n}: {v:.4f}" for n, _, v in rows))
    return 60.0


CRITERIA = [
    (1, "thickness exactness", criterion_1),
    (2, "middle-eps law", criterion_2),
    (3, "closed-form thickness agreement", criterion_3),
    (4, "constants and threshold", criterion_4),
    (5, "alignment", criterion_5),
    (6, "end-to-end certificate", criterion_6),
    (7, "search oracle equivalence", criterion_7),
    (8, "Gaussian expansions", criterion_8),
    (9, "digit systems", criterion_9),
    (10, "complex alignment", criterion_10),
    (11, "rendering regression", criterion_11),
    (12, "2-D thickness properties", criterion_12),
]


def evaluate(number: int, title: str, fn) -> tuple[bool, str]:
    c = Check()
    start = time.perf_counter()
    limit = fn(c)
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        c(False, f"runtime {elapsed:.2f} s exceeds {limit:g} s")
    ok = not c.failed
    detail = "; ".join(c.failed[:3] + c.notes)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title} ({elapsed:.2f} s)"
    if detail:
        line += f": {detail}"
    return ok, line


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion-{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line = evaluate(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n, t, f) for n, t, f in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
