import pytest
from hypothesis import given, strategies as st

from missdigits.expansions import MissingDigitSpec, avoids
from missdigits.search import (
    SearchQuery,
    count_avoiding,
    count_common,
    first_common_in_range,
    generate_avoiding,
    interval_cover,
    next_avoiding,
    search_common,
)


@st.composite
def specs(draw, max_base=12):
    b = draw(st.integers(2, max_base))
    missing = draw(st.frozensets(st.integers(0, b - 1), max_size=b - 1))
    return MissingDigitSpec(b, missing)


def scan(spec_list, bound):
    return [n for n in range(1, bound + 1) if all(avoids(n, s) for s in spec_list)]


def zf(*bases):
    return tuple(MissingDigitSpec.zero_free(b) for b in bases)


@given(st.integers(0, 5000), specs())
def test_next_avoiding_matches_scan(n, spec):
    got = next_avoiding(n, spec)
    want = next((m for m in range(n, n + 20000) if avoids(m, spec)), None)
    if want is None:
        assert got is None or got >= n + 20000
    else:
        assert got == want


def test_next_avoiding_without_nonzero_digits():
    assert next_avoiding(5, MissingDigitSpec(7, frozenset(range(1, 7)))) is None
    assert next_avoiding(0, MissingDigitSpec(7, frozenset(range(1, 7)))) == 0


@given(specs(), st.integers(1, 3000))
def test_generate_avoiding_matches_scan(spec, bound):
    assert list(generate_avoiding(spec, bound)) == scan([spec], bound)


@given(specs(max_base=20), st.integers(0, 10**5))
def test_count_avoiding_matches_scan(spec, bound):
    if bound <= 3000:
        assert count_avoiding(spec, bound) == len(scan([spec], bound))
    else:
        assert count_avoiding(spec, bound) == sum(1 for _ in generate_avoiding(spec, bound))


def test_count_avoiding_known_value():
    assert count_avoiding(MissingDigitSpec.zero_free(10), 1000) == 819


def test_search_three_four():
    q = SearchQuery(zf(3, 4), first=10)
    want = [1, 2, 5, 7, 13, 14, 22, 23, 25, 26]
    assert list(search_common(q, prune=True)) == want
    assert list(search_common(q, prune=False)) == want
    assert scan(zf(3, 4), 26) == want


@given(st.lists(specs(max_base=9), min_size=1, max_size=3), st.integers(1, 3000))
def test_pruned_and_plain_search_agree(spec_list, bound):
    q = SearchQuery(tuple(spec_list), bound=bound)
    want = scan(spec_list, bound)
    assert list(search_common(q, prune=True)) == want
    assert list(search_common(q, prune=False)) == want
    assert count_common(q) == len(want)


def test_count_common_in_parallel():
    q = SearchQuery(zf(3, 4, 5), bound=200_000)
    assert count_common(q, workers=2) == count_common(q, workers=1) == len(scan(zf(3, 4, 5), 200_000))


def test_search_query_validation():
    with pytest.raises(ValueError):
        SearchQuery(())
    with pytest.raises(ValueError):
        SearchQuery(zf(3))
    with pytest.raises(ValueError):
        count_common(SearchQuery(zf(3, 4), first=3))


def test_first_common_in_range():
    s = zf(3, 4)
    assert first_common_in_range(s, 8, 100) == 13
    assert first_common_in_range(s, 27, 40) is None or all(avoids(first_common_in_range(s, 27, 40), x) for x in s)
    for lo in range(0, 200, 7):
        want = next((n for n in range(lo, 201) if all(avoids(n, x) for x in s)), None)
        assert first_common_in_range(s, lo, 200) == want


@pytest.mark.parametrize("b,missing", [(10, {0}), (10, {0, 5}), (7, {0, 3}), (3, {0}), (5, {0, 2})])
def test_interval_cover_matches_avoiders(b, missing):
    spec = MissingDigitSpec(b, frozenset(missing))
    for scale in range(1, 7):
        if b ** scale > 10**5:
            break
        node = interval_cover(spec, scale, scale)
        lo, hi = b ** (scale - 1), b ** scale
        in_cover = [n for n in node.integers() if lo <= n < hi]
        avoiders = [n for n in range(lo, hi) if avoids(n, spec)]
        assert in_cover == avoiders


def test_interval_cover_membership_rule():
    node = interval_cover(MissingDigitSpec.zero_free(10), 2, 1)
    for n in node.integers():
        assert node.union.meets_open(n, n + 1)
    assert all(not node.union.meets_open(n, n + 1) for n in range(0, 100) if n not in node.integers())


def test_large_base_next_avoiding():
    spec = MissingDigitSpec.zero_free(79904626)
    assert next_avoiding(79904626, spec) == 79904627
    assert next_avoiding(79904626**2, spec) == 79904626**2 + 79904626 + 1


def test_all_digits_missing_yields_nothing():
    spec = MissingDigitSpec(5, frozenset(range(1, 5)))
    assert list(generate_avoiding(spec, 100)) == []
    assert list(search_common(SearchQuery((spec,), bound=100))) == []
