import math
import random
import threading
from itertools import product

import pytest

from setshaping import (
    CapacityExceeded,
    Composition,
    RankOutOfRange,
    SymbolString,
    build_class_table,
    class_weight,
    composition_count,
    empirical_info_content,
    enumerate_compositions,
    global_rank,
    global_unrank,
    multinomial_count,
    rank_in_class,
    unrank_in_class,
)

import bruteforce


class TestEnumerateCompositions:
    def test_small(self):
        got = {c.counts for c in enumerate_compositions(2, 2)}
        assert got == {(2, 0), (1, 1), (0, 2)}

    def test_count_12_3(self):
        comps = enumerate_compositions(12, 3)
        assert len(comps) == math.comb(14, 2) == 91
        assert len({c.counts for c in comps}) == 91
        assert all(sum(c.counts) == 12 for c in comps)

    def test_count_1_3(self):
        assert len(enumerate_compositions(1, 3)) == 3

    def test_matches_stars_and_bars(self):
        got = {c.counts for c in enumerate_compositions(5, 3)}
        assert got == bruteforce.compositions_stars_bars(5, 3)


class TestMultinomial:
    def test_examples(self):
        assert multinomial_count(Composition((4, 3, 3))) == 4200
        assert multinomial_count(Composition((7, 0, 0))) == 1
        assert multinomial_count(Composition((1, 1))) == 2

    def test_factorial_oracle(self):
        for c in enumerate_compositions(6, 3):
            assert multinomial_count(c) == bruteforce.multinomial(c.counts)

    def test_weight_oracle(self):
        for c in enumerate_compositions(7, 3):
            assert class_weight(c) == bruteforce.class_weight(c.counts)


class TestClassTable:
    def test_order_n2_m2(self):
        table = build_class_table(2, 2)
        assert [e.composition.counts for e in table.entries] == [(2, 0), (0, 2), (1, 1)]
        assert [e.start_rank for e in table.entries] == [0, 1, 2]
        assert [e.info for e in table.entries] == [0.0, 0.0, 2.0]

    def test_n17_m3_totals(self):
        table = build_class_table(17, 3)
        assert len(table.entries) == 171
        assert sum(e.count for e in table.entries) == 3**17 == 129140163
        assert table.total == 3**17

    def test_n1_m2(self):
        table = build_class_table(1, 2)
        assert [e.composition.counts for e in table.entries] == [(1, 0), (0, 1)]
        assert all(e.info == 0.0 for e in table.entries)

    def test_start_ranks_telescope(self):
        table = build_class_table(9, 3)
        acc = 0
        for e in table.entries:
            assert e.start_rank == acc
            acc += e.count
        assert acc == 3**9

    def test_info_nondecreasing(self):
        table = build_class_table(12, 3)
        infos = [e.info for e in table.entries]
        assert all(a <= b + 1e-12 for a, b in zip(infos, infos[1:]))

    def test_memoized(self):
        assert build_class_table(8, 3) is build_class_table(8, 3)

    def test_concurrent_construction(self):
        results = []
        barrier = threading.Barrier(6)

        def build():
            barrier.wait()
            results.append(build_class_table(10, 4))

        threads = [threading.Thread(target=build) for _ in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r is results[0] for r in results)


class TestCapacity:
    def test_huge_rejected(self):
        with pytest.raises(CapacityExceeded):
            build_class_table(120, 16)
        with pytest.raises(CapacityExceeded):
            enumerate_compositions(120, 16)

    def test_explicit_cap(self):
        with pytest.raises(CapacityExceeded):
            build_class_table(14, 6, cap=100)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("SST_COMPOSITION_CAP", "10")
        with pytest.raises(CapacityExceeded):
            build_class_table(11, 5)
        monkeypatch.delenv("SST_COMPOSITION_CAP")
        assert composition_count(11, 5) == math.comb(15, 4)


class TestRankWithinClass:
    def test_examples(self):
        assert rank_in_class(SymbolString.of((0, 0, 1, 1), 2)) == 0
        assert rank_in_class(SymbolString.of((1, 1, 0, 0), 2)) == 5
        assert rank_in_class(SymbolString.of((0, 1), 2)) == 0

    def test_unrank_examples(self):
        assert unrank_in_class(Composition((2, 2)), 0).symbols == (0, 0, 1, 1)
        assert unrank_in_class(Composition((2, 2)), 5).symbols == (1, 1, 0, 0)
        assert unrank_in_class(Composition((3, 0)), 0).symbols == (0, 0, 0)

    def test_out_of_range(self):
        with pytest.raises(RankOutOfRange):
            unrank_in_class(Composition((2, 2)), 6)
        with pytest.raises(RankOutOfRange):
            unrank_in_class(Composition((2, 2)), -1)

    @pytest.mark.parametrize("m", [2, 3])
    def test_lex_enumeration_oracle(self, m):
        # Group all strings by composition; position in the lex-sorted group
        # must match rank_in_class, and unrank must invert it.
        for n in range(1, 9):
            groups: dict[tuple, list] = {}
            for raw in product(range(m), repeat=n):
                groups.setdefault(bruteforce.string_counts(raw, m), []).append(raw)
            for counts, strings in groups.items():
                strings.sort()
                for i, raw in enumerate(strings):
                    assert rank_in_class(SymbolString.of(raw, m)) == i
                    assert unrank_in_class(Composition(counts), i).symbols == raw


class TestGlobalRank:
    def test_examples(self):
        table = build_class_table(2, 2)
        order = ["00", "11", "01", "10"]
        for i, text in enumerate(order):
            s = SymbolString.from_text(text, 2)
            assert global_rank(s, table) == i
            assert global_unrank(i, table).symbols == s.symbols

    @pytest.mark.parametrize("m", [2, 3])
    def test_exhaustive_bijection(self, m):
        for n in range(1, 9):
            table = build_class_table(n, m)
            expected = bruteforce.canonical_strings(n, m)
            for i, raw in enumerate(expected):
                assert table.rank(raw) == i
                assert table.unrank(i) == raw

    def test_monotone_in_info(self):
        table = build_class_table(6, 3)
        prev = -1.0
        for r in range(3**6):
            info = empirical_info_content(global_unrank(r, table))
            assert info >= prev - 1e-12
            prev = info

    def test_large_n_roundtrip(self):
        rng = random.Random(7)
        table = build_class_table(120, 3)
        for _ in range(25):
            raw = tuple(rng.randrange(3) for _ in range(120))
            assert table.unrank(table.rank(raw)) == raw
        for _ in range(25):
            r = rng.randrange(3**120)
            assert table.rank(table.unrank(r)) == r

    def test_rank_out_of_range(self):
        table = build_class_table(3, 2)
        with pytest.raises(RankOutOfRange):
            global_unrank(8, table)
        with pytest.raises(RankOutOfRange):
            global_unrank(-1, table)

    def test_wrong_length(self):
        table = build_class_table(3, 2)
        with pytest.raises(ValueError):
            table.rank((0, 1))
