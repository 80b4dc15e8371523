"""Enumeration and counting of integers avoiding digits in several bases."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .cantor import LevelSetSpec, level_set
from .expansions import MissingDigitSpec, avoids
from .numeric import IntervalUnion


def _digits_msf(n: int, b: int) -> list[int]:
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return out[::-1] or [0]


def next_avoiding(n: int, spec: MissingDigitSpec) -> Optional[int]:
    """Smallest m >= n whose base-b digits avoid the missing set, or None."""
    if n < 0:
        raise ValueError("n must be natural")
    allowed = spec.allowed
    if not len(allowed):
        return None
    if n == 0 and 0 in allowed:
        return 0
    if not allowed.has_nonzero:
        return None
    b, missing = spec.base, spec.missing
    low = allowed.lowest
    n = max(n, 1)
    while True:
        ds = _digits_msf(n, b)
        pos = next((i for i, d in enumerate(ds) if d in missing), None)
        if pos is None:
            return n
        bigger = allowed.next_at_least(ds[pos] + 1)
        rest = len(ds) - pos - 1
        if bigger is not None:
            head = 0
            for d in ds[:pos]:
                head = head * b + d
            m = head * b + bigger
            for _ in range(rest):
                m = m * b + low
            return m
        # carry into the prefix above pos and retry
        head = 0
        for d in ds[:pos]:
            head = head * b + d
        n = (head + 1) * b ** (rest + 1)


def _subtree(spec_digits: tuple[int, ...], b: int, prefix: int, rem: int, bound: Optional[int]) -> Iterator[int]:
    if rem == 0:
        yield prefix
        return
    scale = b ** (rem - 1)
    for d in spec_digits:
        p = prefix * b + d
        if bound is not None and p * scale > bound:
            return
        yield from _subtree(spec_digits, b, p, rem - 1, bound)


def generate_avoiding(spec: MissingDigitSpec, bound: Optional[int] = None) -> Iterator[int]:
    """All n >= 1 (up to bound if given) with no missing digit, ascending.

    Walks the digit tree length by length, so the cost is proportional to
    the output, not to the bound.
    """
    b = spec.base
    digits = tuple(spec.allowed)
    leads = [d for d in digits if d]
    if not leads:
        return
    length = 1
    while bound is None or b ** (length - 1) <= bound:
        for d in leads:
            if bound is not None and d * b ** (length - 1) > bound:
                return
            yield from _subtree(digits, b, d, length - 1, bound)
        length += 1


def count_avoiding(spec: MissingDigitSpec, bound: int) -> int:
    """Number of 1 <= n <= bound avoiding the missing digits (digit DP)."""
    if bound < 1:
        return 0
    b = spec.base
    allowed = spec.allowed
    k = len(allowed)
    nonzero = k - (0 in allowed)
    ds = _digits_msf(bound, b)
    L = len(ds)
    # shorter lengths: nonzero leading digit, free tail
    total = sum(nonzero * k ** (length - 1) for length in range(1, L))
    # same length, bounded by the digits of bound
    for i, d in enumerate(ds):
        choices = allowed.count_below(d) - (i == 0 and 0 in allowed and d > 0)
        total += choices * k ** (L - i - 1)
        if d not in spec.allowed or (i == 0 and d == 0):
            break
    else:
        total += 1
    return total


@dataclass(frozen=True)
class SearchQuery:
    specs: tuple[MissingDigitSpec, ...]
    bound: Optional[int] = None
    first: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ValueError("at least one base is needed")
        if self.bound is None and self.first is None:
            raise ValueError("give a bound, a count of results, or both")


def _sparsest(specs: Sequence[MissingDigitSpec]) -> int:
    return min(range(len(specs)), key=lambda i: (specs[i].density(), specs[i].base))


def _fill(spec: MissingDigitSpec, prefix: int, rem: int) -> tuple[int, int]:
    lo = hi = prefix
    a, z = spec.allowed.lowest, spec.allowed.highest
    for _ in range(rem):
        lo, hi = lo * spec.base + a, hi * spec.base + z
    return lo, hi


def _pruned(driver: MissingDigitSpec, others: Sequence[MissingDigitSpec], prefix: int, rem: int,
            bound: Optional[int]) -> Iterator[int]:
    lo, hi = _fill(driver, prefix, rem)
    if bound is not None:
        if lo > bound:
            return
        hi = min(hi, bound)
    for s in others:
        nxt = next_avoiding(lo, s)
        if nxt is None or nxt > hi:
            return
    if rem == 0:
        yield prefix
        return
    for d in driver.allowed:
        yield from _pruned(driver, others, prefix * driver.base + d, rem - 1, bound)


def _stream(q: SearchQuery, prune: bool) -> Iterator[int]:
    i = _sparsest(q.specs)
    driver = q.specs[i]
    others = q.specs[:i] + q.specs[i + 1:]
    if not prune or not others:
        for n in generate_avoiding(driver, q.bound):
            if all(avoids(n, s) for s in others):
                yield n
        return
    leads = [d for d in driver.allowed if d]
    if not leads:
        return
    length = 1
    b = driver.base
    while q.bound is None or b ** (length - 1) <= q.bound:
        for d in leads:
            yield from _pruned(driver, others, d, length - 1, q.bound)
        length += 1


def auto_prune(q: SearchQuery) -> bool:
    """Prune when the filter is expected to reject nearly every candidate."""
    if len(q.specs) < 2:
        return False
    i = _sparsest(q.specs)
    driver = q.specs[i]
    size = q.bound if q.bound is not None else driver.base ** 12
    survive = 1.0
    for j, s in enumerate(q.specs):
        if j != i:
            digits = max(1, math.ceil(math.log(max(size, 2)) / math.log(s.base)))
            survive *= float(s.density()) ** digits
    return survive < 1e-2


def search_common(q: SearchQuery, prune: Optional[bool] = None) -> Iterator[int]:
    """Integers n >= 1 avoiding the missing digits in every base, ascending.

    Candidates come from the digit tree of the sparsest base.  With pruning,
    a subtree is dropped as soon as its integer range contains no integer
    avoiding the digits of some other base.  Both paths yield the same
    sequence.
    """
    if any(not s.allowed.has_nonzero for s in q.specs):
        return
    if prune is None:
        prune = auto_prune(q)
    count = 0
    for n in _stream(q, prune):
        yield n
        count += 1
        if q.first is not None and count >= q.first:
            return


def _count_chunk(args) -> int:
    specs, bound, driver_idx, lead, length = args
    driver = specs[driver_idx]
    others = specs[:driver_idx] + specs[driver_idx + 1:]
    return sum(1 for _ in _pruned(driver, others, lead, length - 1, bound))


def count_common(q: SearchQuery, workers: int = 1) -> int:
    """Number of common avoiders up to q.bound.

    A single base is counted by digit DP.  Several bases are counted by the
    pruned walk, split over leading-digit subtrees when workers > 1.
    """
    if q.bound is None:
        raise ValueError("counting needs a bound")
    if q.first is not None:
        return sum(1 for _ in search_common(q))
    if len(q.specs) == 1:
        return count_avoiding(q.specs[0], q.bound)
    if any(not s.allowed.has_nonzero for s in q.specs):
        return 0
    i = _sparsest(q.specs)
    driver = q.specs[i]
    leads = [d for d in driver.allowed if d]
    b = driver.base
    tasks = []
    length = 1
    while b ** (length - 1) <= q.bound:
        tasks.extend((q.specs, q.bound, i, d, length) for d in leads)
        length += 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return sum(ex.map(_count_chunk, tasks))
    return sum(map(_count_chunk, tasks))


def first_common_in_range(specs: Sequence[MissingDigitSpec], lo: int, hi: int) -> Optional[int]:
    """Smallest integer in [lo, hi] avoiding every spec, by alternating jumps."""
    x = max(lo, 0)
    while x <= hi:
        moved = False
        for s in specs:
            y = next_avoiding(x, s)
            if y is None:
                return None
            if y != x:
                x, moved = y, True
                break
        if not moved:
            return x
    return None


# ---------------------------------------------------------------------------
# interval covers


@dataclass(frozen=True)
class CoverNode:
    """Depth-L level set of b**scale * C_{b,D}.

    Every avoider with exactly ``scale`` base-b digits is an integer of the
    cover: its unit cell (n, n+1) meets the union.
    """

    spec: MissingDigitSpec
    scale: int
    depth: int
    union: IntervalUnion

    def integers(self) -> list[int]:
        """Integers n whose unit cell (n, n+1) meets the cover."""
        # (n, n+1) meets [lo, hi] iff lo - 1 < n < hi, i.e. floor(lo) <= n <= ceil(hi) - 1
        out: list[int] = []
        for p in self.union:
            n0 = max(math.floor(p.lo), 0, out[-1] + 1 if out else 0)
            out.extend(range(n0, math.ceil(p.hi)))
        return out


def interval_cover(spec: MissingDigitSpec, scale: int, depth: int) -> CoverNode:
    return CoverNode(spec, scale, depth, level_set(LevelSetSpec(spec, scale, depth)))

