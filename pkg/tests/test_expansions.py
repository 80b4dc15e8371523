from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from missdigits.expansions import (
    AllowedDigits,
    DigitString,
    MissingDigitSpec,
    allowed_runs,
    avoids,
    eval_digits,
    expand_nat,
    maximal_runs,
    parse_digit_set,
)


@st.composite
def base_and_missing(draw, max_base=40):
    b = draw(st.integers(2, max_base))
    missing = draw(st.frozensets(st.integers(0, b - 1), max_size=b))
    return b, missing


@given(st.integers(0, 10**30), st.integers(2, 1000))
def test_expand_round_trip(n, b):
    d = expand_nat(n, b)
    assert eval_digits(d) == n
    assert all(0 <= c < b for c in d.digits)


def test_expand_matches_builtin_formatting():
    for n in range(0, 500):
        assert str(expand_nat(n, 2)) == format(n, "b")
        assert str(expand_nat(n, 16)) == format(n, "x")


def test_digit_string_rejects_bad_input():
    with pytest.raises(ValueError):
        DigitString(10, (1, 0))
    with pytest.raises(ValueError):
        DigitString(10, (10,))
    with pytest.raises(ValueError):
        expand_nat(-1, 10)
    with pytest.raises(ValueError):
        expand_nat(5, 1)


def test_large_base_string_uses_separators():
    assert str(expand_nat(100 * 37 + 5, 100)) == "37:5"


@given(base_and_missing())
def test_allowed_digits_match_explicit_set(bm):
    b, missing = bm
    a = AllowedDigits(b, missing)
    explicit = [d for d in range(b) if d not in missing]
    assert list(a) == explicit
    assert len(a) == len(explicit)
    assert a == set(explicit)
    for d in range(-1, b + 2):
        assert (d in a) == (d in explicit)
        nxt = [x for x in explicit if x >= d]
        prv = [x for x in explicit if x <= d]
        assert a.next_at_least(d) == (nxt[0] if nxt else None)
        assert a.prev_at_most(d) == (prv[-1] if prv else None)
        assert a.count_below(d) == sum(1 for x in explicit if x < d)
    assert a.has_nonzero == any(explicit[1:] or [x for x in explicit if x])


@given(base_and_missing())
def test_allowed_runs_match_maximal_runs(bm):
    b, missing = bm
    assert allowed_runs(b, missing) == maximal_runs(d for d in range(b) if d not in missing)


def test_allowed_digits_handle_huge_bases():
    a = AllowedDigits(80_000_000, {0, 17})
    assert len(a) == 79_999_998
    assert a.lowest == 1 and a.highest == 79_999_999
    assert a.next_at_least(17) == 18
    assert 17 not in a and 18 in a


def test_parse_digit_set():
    assert parse_digit_set("0, 3,5") == frozenset({0, 3, 5})
    assert parse_digit_set("") == frozenset()


def test_spec_flags():
    s = MissingDigitSpec(10, frozenset({0, 5}))
    assert s.structured and s.zero_missing and s.separated and s.top_allowed
    assert s.r == Fraction(4, 10)
    t = MissingDigitSpec(10, frozenset({4, 5}))
    assert not t.separated and not t.structured
    u = MissingDigitSpec(10, frozenset({9}))
    assert not u.top_allowed and not u.structured


def test_corollary_reduction_keeps_r():
    s = MissingDigitSpec(10, frozenset({5}), Fraction(3, 10))
    assert not s.structured and s.corollary_ok
    z = s.with_zero_missing()
    assert z.structured and z.r == Fraction(3, 10)
    # the run through 0 is too short to give up a digit
    assert not MissingDigitSpec(10, frozenset({3}), Fraction(3, 10)).corollary_ok


def test_r_cannot_exceed_shortest_run():
    with pytest.raises(ValueError):
        MissingDigitSpec(10, frozenset({0, 5}), Fraction(1, 2))


def test_spec_validation():
    with pytest.raises(ValueError):
        MissingDigitSpec(10, frozenset({10}))
    with pytest.raises(ValueError):
        MissingDigitSpec(1, frozenset())


def test_empty_missing_and_base_two_are_allowed():
    s = MissingDigitSpec(2, frozenset())
    assert len(s.allowed) == 2
    assert MissingDigitSpec.zero_free(2).allowed == {1}


@given(st.integers(0, 10**12), base_and_missing(max_base=12))
def test_avoids_matches_digits(n, bm):
    b, missing = bm
    spec = MissingDigitSpec(b, missing)
    assert avoids(n, spec) == (not set(expand_nat(n, b).digits) & missing)
