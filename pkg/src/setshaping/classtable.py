"""Canonical ordering of length-n strings via type classes, with rank/unrank.

The canonical order sorts strings by ascending information content, then
lexicographically. Concretely it is class-blocked: type classes are laid out
by ascending class information content, classes with equal information
content are ordered so that the class containing the lexicographically
smallest string comes first, and strings inside a class appear in
lexicographic order. Ranking therefore needs only the class start offsets
plus a multinomial rank within the class, which costs O(n * m) big-integer
operations instead of touching any of the m^n strings.

Class information content is compared exactly through the integer
``class_weight`` (product of count**count): for fixed n, information content
is n*log2(n) - log2(weight), so ascending information content is exactly
descending weight. Sorting on the integer weight avoids any floating-point
tie ambiguity between classes whose information contents coincide.
"""
from __future__ import annotations

import math
import os
import threading
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .model import Composition, SymbolString, counts_of, info_of_counts

__all__ = [
    "CapacityExceeded",
    "RankOutOfRange",
    "DEFAULT_COMPOSITION_CAP",
    "composition_cap",
    "composition_count",
    "enumerate_compositions",
    "multinomial_count",
    "class_weight",
    "ClassEntry",
    "ClassTable",
    "build_class_table",
    "rank_in_class",
    "unrank_in_class",
    "global_rank",
    "global_unrank",
]

DEFAULT_COMPOSITION_CAP = 10**7

# Environment override for the class-count cap; read at call time so a
# long-running process picks up changes made by tests or operators.
CAP_ENV_VAR = "SST_COMPOSITION_CAP"


class CapacityExceeded(RuntimeError):
    """The (n, m) class table would exceed the configured composition cap."""


class RankOutOfRange(ValueError):
    """Rank is outside [0, class size) or [0, m^n)."""


def composition_cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return DEFAULT_COMPOSITION_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{CAP_ENV_VAR} must be positive, got {cap}")
    return cap


def composition_count(n: int, m: int) -> int:
    """Number of weak compositions of n into m parts: C(n+m-1, m-1)."""
    return math.comb(n + m - 1, m - 1)


def _check_capacity(n: int, m: int, cap: int | None) -> None:
    if n < 1:
        raise ValueError(f"length must be at least 1, got {n}")
    if m < 2:
        raise ValueError(f"alphabet size must be at least 2, got {m}")
    limit = composition_cap() if cap is None else cap
    total = composition_count(n, m)
    if total > limit:
        raise CapacityExceeded(
            f"{total} compositions for length {n} over {m} symbols exceeds "
            f"the cap of {limit}"
        )


def enumerate_compositions(n: int, m: int, cap: int | None = None) -> list[Composition]:
    """All weak compositions of n into m parts, each exactly once."""
    _check_capacity(n, m, cap)
    return [Composition(c) for c in _raw_compositions(n, m)]


def _raw_compositions(n: int, m: int) -> list[tuple[int, ...]]:
    if m == 1:
        return [(n,)]
    out: list[tuple[int, ...]] = []
    for first in range(n, -1, -1):
        for rest in _raw_compositions(n - first, m - 1):
            out.append((first,) + rest)
    return out


def multinomial_count(c: Composition) -> int:
    """Number of strings in the type class: n! / prod(counts!)."""
    return _multinomial(c.counts)


def _multinomial(counts: Sequence[int]) -> int:
    # Product of binomials is much cheaper than n! for large n.
    result = 1
    partial = 0
    for k in counts:
        partial += k
        result *= math.comb(partial, k)
    return result


def class_weight(c: Composition) -> int:
    """prod(count**count), the exact ordering key.

    For classes of equal length, ascending information content is exactly
    descending weight.
    """
    return _weight(c.counts)


def _weight(counts: Sequence[int]) -> int:
    w = 1
    for k in counts:
        if k:
            w *= k**k
    return w


def _class_sort_key(counts: tuple[int, ...]) -> tuple:
    # Descending weight (= ascending information content); among equal-info
    # classes, more mass on smaller symbols first, which is lexicographic
    # order of each class's smallest member string.
    return (-_weight(counts), tuple(-k for k in counts))


@dataclass(frozen=True)
class ClassEntry:
    composition: Composition
    info: float
    count: int
    start_rank: int


class ClassTable:
    """Type classes of length-n strings in canonical order, with cumulative
    start ranks. Immutable once built; share freely across threads."""

    def __init__(self, n: int, m: int, ordered_counts: list[tuple[int, ...]]):
        self.n = n
        self.m = m
        entries: list[ClassEntry] = []
        starts: list[int] = []
        counts_list: list[tuple[int, ...]] = []
        sizes: list[int] = []
        index: dict[tuple[int, ...], int] = {}
        start = 0
        for counts in ordered_counts:
            size = _multinomial(counts)
            entries.append(
                ClassEntry(Composition(counts), info_of_counts(counts), size, start)
            )
            index[counts] = len(starts)
            starts.append(start)
            counts_list.append(counts)
            sizes.append(size)
            start += size
        if start != m**n:
            raise AssertionError("class sizes do not cover the string space")
        self.entries = entries
        self.total = start
        self._starts = starts
        self._counts = counts_list
        self._sizes = sizes
        self._index = index

    def entry_for(self, counts: Sequence[int]) -> ClassEntry:
        i = self._index.get(tuple(counts))
        if i is None:
            raise ValueError(f"no class {tuple(counts)} in table (n={self.n}, m={self.m})")
        return self.entries[i]

    def locate(self, rank: int) -> ClassEntry:
        """The class whose rank block contains ``rank``."""
        if not 0 <= rank < self.total:
            raise RankOutOfRange(f"rank {rank} outside [0, {self.total})")
        return self.entries[bisect_right(self._starts, rank) - 1]

    def rank(self, symbols: Sequence[int]) -> int:
        """Canonical rank of a raw symbol sequence of length n."""
        if len(symbols) != self.n:
            raise ValueError(f"expected length {self.n}, got {len(symbols)}")
        counts = counts_of(symbols, self.m)
        i = self._index.get(counts)
        if i is None:
            raise ValueError(f"symbols outside alphabet of size {self.m}")
        return self._starts[i] + _rank_within(symbols, counts, self._sizes[i])

    def unrank(self, rank: int) -> tuple[int, ...]:
        """Inverse of :meth:`rank`."""
        if not 0 <= rank < self.total:
            raise RankOutOfRange(f"rank {rank} outside [0, {self.total})")
        i = bisect_right(self._starts, rank) - 1
        return _unrank_within(self._counts[i], self._sizes[i], rank - self._starts[i])


def _rank_within(symbols: Sequence[int], counts: tuple[int, ...], size: int) -> int:
    # Position of `symbols` in the lexicographic enumeration of its class.
    # `block` tracks the number of completions of the current suffix; fixing
    # symbol b at the front leaves block * counts[b] / remaining of them,
    # always an exact integer division.
    remaining = len(symbols)
    block = size
    left = list(counts)
    r = 0
    for a in symbols:
        for b in range(a):
            cb = left[b]
            if cb:
                r += block * cb // remaining
        r_a = left[a]
        block = block * r_a // remaining
        left[a] = r_a - 1
        remaining -= 1
    return r


def _unrank_within(counts: tuple[int, ...], size: int, r: int) -> tuple[int, ...]:
    remaining = sum(counts)
    block = size
    left = list(counts)
    out = []
    m = len(counts)
    while remaining:
        for b in range(m):
            cb = left[b]
            if not cb:
                continue
            sub = block * cb // remaining
            if r < sub:
                out.append(b)
                block = sub
                left[b] = cb - 1
                remaining -= 1
                break
            r -= sub
        else:
            raise AssertionError("rank exhausted the class")
    return tuple(out)


_tables: dict[tuple[int, int], ClassTable] = {}
_tables_lock = threading.Lock()


def build_class_table(n: int, m: int, cap: int | None = None) -> ClassTable:
    """Memoized class table for (n, m); raises CapacityExceeded when the
    composition count is over the cap (``SST_COMPOSITION_CAP``, default 10^7).
    The cap is enforced when a table is first built; already-cached tables
    are returned as-is.
    """
    key = (n, m)
    table = _tables.get(key)
    if table is not None:
        return table
    _check_capacity(n, m, cap)
    ordered = sorted(_raw_compositions(n, m), key=_class_sort_key)
    table = ClassTable(n, m, ordered)
    with _tables_lock:
        return _tables.setdefault(key, table)


def rank_in_class(s: SymbolString) -> int:
    """0-based position of s in the lexicographic enumeration of the strings
    sharing its composition."""
    counts = counts_of(s.symbols, s.alphabet.size)
    return _rank_within(s.symbols, counts, _multinomial(counts))


def unrank_in_class(c: Composition, r: int) -> SymbolString:
    """Inverse of :func:`rank_in_class` restricted to class ``c``."""
    size = _multinomial(c.counts)
    if not 0 <= r < size:
        raise RankOutOfRange(f"rank {r} outside class of size {size}")
    return SymbolString.of(_unrank_within(c.counts, size, r), c.alphabet_size)


def global_rank(s: SymbolString, table: ClassTable) -> int:
    """Canonical rank of s among all length-n strings."""
    if s.alphabet.size != table.m:
        raise ValueError(f"alphabet size {s.alphabet.size} does not match table ({table.m})")
    return table.rank(s.symbols)


def global_unrank(r: int, table: ClassTable) -> SymbolString:
    """String at canonical rank r; inverse of :func:`global_rank`."""
    return SymbolString.of(table.unrank(r), table.m)
