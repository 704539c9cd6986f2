import math
from itertools import permutations, product

import pytest

from setshaping import (
    Alphabet,
    Composition,
    SourceEnsemble,
    SymbolString,
    ZeroProbabilitySymbol,
    composition_info,
    composition_of,
    empirical_info_content,
    sequence_probability,
    shannon_entropy,
    source_info_content,
)

import bruteforce


def s_of(text, m):
    return SymbolString.from_text(text, m)


class TestValidation:
    def test_alphabet_too_small(self):
        with pytest.raises(ValueError):
            Alphabet(1)

    def test_source_wrong_length(self):
        with pytest.raises(ValueError):
            SourceEnsemble(Alphabet(3), (0.5, 0.5))

    def test_source_negative(self):
        with pytest.raises(ValueError):
            SourceEnsemble(Alphabet(2), (1.5, -0.5))

    def test_source_sum_off(self):
        with pytest.raises(ValueError):
            SourceEnsemble(Alphabet(2), (0.6, 0.5))

    def test_empty_string_rejected(self):
        with pytest.raises(ValueError):
            SymbolString.of([], 2)

    def test_symbol_out_of_range(self):
        with pytest.raises(ValueError):
            SymbolString.of([0, 3], 3)

    def test_negative_count(self):
        with pytest.raises(ValueError):
            Composition((2, -1))


class TestShannonEntropy:
    def test_fair_coin(self):
        assert shannon_entropy(SourceEnsemble.uniform(2)) == 1.0

    def test_degenerate(self):
        assert shannon_entropy(SourceEnsemble(Alphabet(2), (1.0, 0.0))) == 0.0

    def test_uniform_ternary(self):
        assert shannon_entropy(SourceEnsemble.uniform(3)) == pytest.approx(
            math.log2(3), abs=1e-12
        )


class TestEmpiricalInfo:
    def test_single_symbol_string(self):
        assert empirical_info_content(s_of("0000000000", 3)) == 0.0

    def test_counts_4_3_3(self):
        s = SymbolString.of([0] * 4 + [1] * 3 + [2] * 3, 3)
        expected = -(4 * math.log2(0.4) + 6 * math.log2(0.3))
        assert empirical_info_content(s) == pytest.approx(expected, abs=1e-12)
        assert empirical_info_content(s) == pytest.approx(15.7095, abs=5e-4)

    def test_mean_over_all_ternary_length_10(self):
        # Heavy but exact: every one of the 3^10 strings.
        total = 0.0
        for s in product(range(3), repeat=10):
            total += bruteforce.string_info(s)
        assert total / 3**10 == pytest.approx(14.263, abs=5e-4)


class TestSourceInfo:
    def test_uniform_ternary_length_10(self):
        s = s_of("0120120120", 3)
        assert source_info_content(s, SourceEnsemble.uniform(3)) == pytest.approx(
            10 * math.log2(3), rel=1e-12
        )

    def test_fair_coin_two_symbols(self):
        assert source_info_content(s_of("01", 2), SourceEnsemble.uniform(2)) == 2.0

    def test_certain_symbol(self):
        src = SourceEnsemble(Alphabet(2), (1.0, 0.0))
        assert source_info_content(s_of("0", 2), src) == 0.0

    def test_zero_probability_symbol(self):
        src = SourceEnsemble(Alphabet(2), (1.0, 0.0))
        with pytest.raises(ZeroProbabilitySymbol):
            source_info_content(s_of("01", 2), src)

    def test_alphabet_mismatch(self):
        with pytest.raises(ValueError):
            source_info_content(s_of("01", 2), SourceEnsemble.uniform(3))


class TestSequenceProbability:
    def test_uniform_ternary(self):
        s = s_of("0011220120", 3)
        assert sequence_probability(s, SourceEnsemble.uniform(3)) == pytest.approx(
            3.0**-10, rel=1e-12
        )

    def test_certain(self):
        src = SourceEnsemble(Alphabet(2), (1.0, 0.0))
        assert sequence_probability(s_of("00", 2), src) == 1.0
        assert sequence_probability(s_of("01", 2), src) == 0.0

    def test_matches_source_info(self):
        src = SourceEnsemble(Alphabet(3), (0.5, 0.25, 0.25))
        s = s_of("0121", 3)
        p = sequence_probability(s, src)
        assert p == pytest.approx(2.0 ** -source_info_content(s, src), rel=1e-12)

    @pytest.mark.parametrize(
        "m,probs", [(2, (0.7, 0.3)), (3, (0.5, 0.3, 0.2))]
    )
    def test_sums_to_one_exhaustive(self, m, probs):
        src = SourceEnsemble(Alphabet(m), probs)
        for n in range(1, 9):
            total = sum(
                sequence_probability(SymbolString.of(s, m), src)
                for s in product(range(m), repeat=n)
            )
            assert total == pytest.approx(1.0, abs=1e-9)


class TestComposition:
    def test_composition_of(self):
        assert composition_of(s_of("0102", 3)).counts == (2, 1, 1)
        assert composition_of(s_of("1111", 2)).counts == (0, 4)

    def test_composition_info_examples(self):
        assert composition_info(Composition((10, 0, 0))) == 0.0
        assert composition_info(Composition((4, 3, 3))) == pytest.approx(15.7095, abs=5e-4)
        assert composition_info(Composition((1, 1))) == 2.0


class TestInvariants:
    @pytest.mark.parametrize("m", [2, 3])
    def test_empirical_equals_composition_info(self, m):
        for n in range(1, 9):
            for raw in product(range(m), repeat=n):
                s = SymbolString.of(raw, m)
                info = empirical_info_content(s)
                assert info == composition_info(composition_of(s))
                assert 0.0 <= info <= n * math.log2(m) + 1e-12

    def test_permutation_invariance(self):
        base = (0, 1, 1, 2, 2, 2)
        infos = {empirical_info_content(SymbolString.of(p, 3)) for p in permutations(base)}
        assert len(infos) == 1

    def test_matches_bruteforce_info(self):
        for raw in product(range(3), repeat=5):
            s = SymbolString.of(raw, 3)
            assert empirical_info_content(s) == pytest.approx(
                bruteforce.string_info(raw), abs=1e-12
            )


class TestTextFormat:
    def test_digit_roundtrip(self):
        s = s_of("0102", 3)
        assert s.to_text() == "0102"

    def test_comma_roundtrip(self):
        s = SymbolString.from_text("0,11,3", 12)
        assert s.symbols == (0, 11, 3)
        assert s.to_text() == "0,11,3"

    def test_bad_symbol(self):
        with pytest.raises(ValueError):
            SymbolString.from_text("012", 2)
