import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from missdigits.cantor import (
    INF,
    LevelSetSpec,
    cantor_hull,
    check_formula,
    gap_system,
    level_set,
    middle_cantor,
    thickness_exact,
    thickness_formula,
    truncate_right_at_gap,
)
from missdigits.expansions import MissingDigitSpec
from missdigits.numeric import Interval, IntervalUnion


def naive_level_set(b, digits, depth):
    lo, hi = Fraction(min(digits), b - 1), Fraction(max(digits), b - 1)
    parts = []
    for word in itertools.product(sorted(digits), repeat=depth):
        x = sum(Fraction(c, b ** (t + 1)) for t, c in enumerate(word))
        parts.append(Interval(x + lo / b ** depth, x + hi / b ** depth))
    return IntervalUnion(parts)


def naive_thickness(u, order=None):
    """Remove gaps one at a time from an explicit list of pieces."""
    if len(u) == 1:
        return INF
    gaps = u.gaps()
    if order is None:
        order = sorted(range(len(gaps)), key=lambda i: (-gaps[i].length, i))
    pieces = [u.hull]
    best = None
    for i in order:
        g = gaps[i]
        k = next(j for j, p in enumerate(pieces) if p.lo <= g.lo and g.hi <= p.hi)
        p = pieces.pop(k)
        left, right = Interval(p.lo, g.lo), Interval(g.hi, p.hi)
        pieces[k:k] = [left, right]
        ratio = min(left.length, right.length) / g.length
        best = ratio if best is None else min(best, ratio)
    return best


@st.composite
def small_specs(draw):
    b = draw(st.integers(3, 9))
    missing = draw(st.frozensets(st.integers(0, b - 1), max_size=b - 2))
    return MissingDigitSpec(b, missing)


def test_level_set_zero_free_ten():
    u = level_set(LevelSetSpec(MissingDigitSpec.zero_free(10), 0, 1))
    assert len(u) == 9
    assert {g.length for g in u.gaps()} == {Fraction(1, 90)}
    assert {p.length for p in u} == {Fraction(4, 45)}


def test_level_set_middle_thirds():
    u = level_set(LevelSetSpec(MissingDigitSpec(3, frozenset({1})), 0, 1))
    assert u == IntervalUnion.from_pairs([(0, Fraction(1, 3)), (Fraction(2, 3), 1)])


def test_level_set_base_five_depth_two():
    spec = MissingDigitSpec.zero_free(5)
    u = level_set(LevelSetSpec(spec, 0, 2))
    assert len(u) == 16
    assert u.hull == Interval(Fraction(1, 4), 1)
    assert cantor_hull(spec) == u.hull


@given(small_specs(), st.integers(1, 3), st.integers(-2, 2))
def test_level_set_matches_naive(spec, depth, scale):
    if len(spec.allowed) < 2:
        return
    u = level_set(LevelSetSpec(spec, scale, depth))
    v = naive_level_set(spec.base, list(spec.allowed), depth).affine(Fraction(spec.base) ** scale)
    assert u == v


def test_level_set_errors():
    with pytest.raises(ValueError):
        LevelSetSpec(MissingDigitSpec.zero_free(5), 0, 0)
    with pytest.raises(ValueError):
        level_set(LevelSetSpec(MissingDigitSpec(5, frozenset({0, 1, 2, 3})), 0, 1))


def test_gap_system_examples():
    assert gap_system(IntervalUnion.from_pairs([(0, 1)])).gaps == ()
    mt = gap_system(IntervalUnion.from_pairs([(0, Fraction(1, 3)), (Fraction(2, 3), 1)]))
    (g,) = mt.gaps
    assert g.gap == Interval(Fraction(1, 3), Fraction(2, 3))
    assert g.left.length == g.right.length == Fraction(1, 3)
    ten = gap_system(level_set(LevelSetSpec(MissingDigitSpec.zero_free(10), 0, 2)))
    lengths = [g.gap.length for g in ten.gaps]
    assert lengths == [Fraction(1, 90)] * 8 + [Fraction(1, 900)] * 72


@given(small_specs(), st.integers(1, 3))
def test_gap_system_invariants(spec, depth):
    if len(spec.allowed) < 2:
        return
    gs = gap_system(level_set(LevelSetSpec(spec, 0, depth)))
    lengths = [g.gap.length for g in gs.gaps]
    assert lengths == sorted(lengths, reverse=True)
    for g in gs.gaps:
        assert gs.hull.contains_interval(g.gap)
        assert g.left.hi == g.gap.lo and g.right.lo == g.gap.hi
        assert g.left.length > 0 and g.right.length > 0


def test_thickness_sentinels():
    assert thickness_exact(IntervalUnion.from_pairs([(0, 1)])) == INF
    assert thickness_exact(IntervalUnion.from_pairs([(1, 1)])) == 0
    with pytest.raises(ValueError):
        thickness_exact(IntervalUnion())


@pytest.mark.parametrize("b", [4, 5, 10, 37])
@pytest.mark.parametrize("depth", [1, 2, 3])
def test_zero_free_thickness(b, depth):
    u = level_set(LevelSetSpec(MissingDigitSpec.zero_free(b), 0, depth))
    assert thickness_exact(u) == b - 2


@pytest.mark.parametrize("eps,tau", [(Fraction(1, 3), 1), (Fraction(1, 5), 2), (Fraction(1, 2), Fraction(1, 2))])
@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_middle_cantor_thickness(eps, tau, depth):
    assert thickness_exact(middle_cantor(eps, depth)) == tau


@given(small_specs(), st.integers(1, 3))
def test_thickness_matches_naive_replay(spec, depth):
    if len(spec.allowed) < 2:
        return
    u = level_set(LevelSetSpec(spec, 0, depth))
    assert thickness_exact(u) == naive_thickness(u)


@given(small_specs(), st.integers(1, 3), st.randoms(use_true_random=False))
def test_thickness_ignores_tie_order(spec, depth, rnd):
    if len(spec.allowed) < 2:
        return
    u = level_set(LevelSetSpec(spec, 0, depth))
    gaps = u.gaps()
    if not gaps:
        return
    keyed = [(-g.length, rnd.random(), i) for i, g in enumerate(gaps)]
    order = [i for _, _, i in sorted(keyed)]
    assert naive_thickness(u, order) == thickness_exact(u)


@given(small_specs(), st.integers(1, 2),
       st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(lambda a: a != 0),
       st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_thickness_affine_invariance(spec, depth, a, c):
    if len(spec.allowed) < 2:
        return
    u = level_set(LevelSetSpec(spec, 0, depth))
    assert thickness_exact(u.affine(a, c)) == thickness_exact(u)


def test_zero_free_gap_lengths_by_scale():
    for b in (4, 10):
        for j in (0, 1, 2):
            u = level_set(LevelSetSpec(MissingDigitSpec.zero_free(b), j, 1))
            scale = Fraction(b) ** j
            assert {g.length for g in u.gaps()} == {scale / b / (b - 1)}
            assert {p.length for p in u} == {scale / b * (1 - Fraction(1, b - 1))}


STRUCTURED = [
    (10, {0, 5}), (10, {0}), (12, {0, 4, 8}), (7, {0, 3}), (16, {0, 5, 10}), (11, {0, 6}),
    (9, {0, 2}), (13, {0, 7}), (20, {0, 10}), (15, {0, 3, 9}), (8, {0, 4}), (6, {0, 2}),
]


@pytest.mark.parametrize("b,missing", STRUCTURED)
def test_formula_agrees_with_exact(b, missing):
    spec = MissingDigitSpec(b, frozenset(missing))
    for depth in (1, 2, 3):
        check = check_formula(spec, depth)
        assert check.agrees, check.to_json()
        assert check.evidence is None


def test_formula_values():
    spec = MissingDigitSpec(10, frozenset({0, 5}))
    f = thickness_formula(spec)
    assert f.value == Fraction(7, 2) and f.lower_bound == Fraction(32, 10)
    for b in (4, 5, 10, 37):
        assert thickness_formula(MissingDigitSpec.zero_free(b)).value == b - 2


@given(st.integers(3, 60), st.integers(1, 59))
def test_formula_dominates_lower_bound(b, k):
    if k > b - 1:
        return
    r = Fraction(k, b)
    assert (b - 1) * r - Fraction(1, b) >= r * (b - 2)


def test_formula_requires_structure():
    with pytest.raises(ValueError):
        thickness_formula(MissingDigitSpec(10, frozenset({5})))


def test_formula_mismatch_carries_evidence():
    # an r below the shortest run makes the closed form undershoot
    spec = MissingDigitSpec(10, frozenset({0, 5}), Fraction(3, 10))
    a, b = check_formula(spec, 2), check_formula(spec, 2)
    assert not a.agrees
    assert a.evidence is not None and len(a.evidence.gaps) == len(level_set(LevelSetSpec(spec, 0, 2)).gaps())
    assert a.to_json() == b.to_json()


def test_truncate_middle_thirds():
    u = IntervalUnion.from_pairs([(0, Fraction(1, 3)), (Fraction(2, 3), 1)])
    clipped, cut = truncate_right_at_gap(u, Fraction(1, 2))
    assert cut == Fraction(1, 3)
    assert clipped == IntervalUnion.from_pairs([(0, Fraction(1, 3))])


def test_truncate_scaled_zero_free_ten():
    u = level_set(LevelSetSpec(MissingDigitSpec.zero_free(10), 1, 1))
    candidates = [g.lo for g in u.gaps()]
    assert len(candidates) == 8
    _, cut = truncate_right_at_gap(u, 10)
    assert cut == min(candidates, key=lambda x: (abs(x - 10), x))
    assert cut == 9


def test_truncate_tie_goes_left():
    u = IntervalUnion.from_pairs([(0, 1), (2, 3), (4, 5)])
    assert truncate_right_at_gap(u, 2)[1] == 1


def test_truncate_needs_a_gap():
    with pytest.raises(ValueError):
        truncate_right_at_gap(IntervalUnion.from_pairs([(0, 1)]), 0)


@given(small_specs(), st.integers(1, 3), st.fractions(min_value=0, max_value=1, max_denominator=50))
def test_truncate_never_thins(spec, depth, target):
    if len(spec.allowed) < 2:
        return
    u = level_set(LevelSetSpec(spec, 0, depth))
    if not u.gaps():
        return
    clipped, cut = truncate_right_at_gap(u, target)
    assert clipped.hull.hi == cut
    assert thickness_exact(clipped) >= thickness_exact(u)
