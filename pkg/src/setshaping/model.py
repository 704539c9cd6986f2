"""Alphabets, sources, symbol strings, and their information measures.

All information quantities are in bits (log base 2), with the convention
0*log2(0) = 0. Two readings of a string's information content are exposed:

* ``empirical_info_content`` uses the within-string symbol frequencies and
  is constant on a type class (strings sharing a symbol histogram),
* ``source_info_content`` uses the source's probabilities.

Shaping and all aggregate analysis are built on the empirical reading.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Alphabet",
    "SourceEnsemble",
    "SymbolString",
    "Composition",
    "InfoBits",
    "ZeroProbabilitySymbol",
    "shannon_entropy",
    "empirical_info_content",
    "source_info_content",
    "sequence_probability",
    "composition_of",
    "composition_info",
    "counts_of",
    "info_of_counts",
]

# Nonnegative real number of bits.
InfoBits = float

PROB_SUM_TOLERANCE = 1e-12


class ZeroProbabilitySymbol(ValueError):
    """A string contains a symbol the source assigns probability zero."""


@dataclass(frozen=True)
class Alphabet:
    """Indexed alphabet; the symbols are the integers ``0 .. size-1``."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.size}")


@dataclass(frozen=True)
class SourceEnsemble:
    """Memoryless source: an alphabet plus one probability per symbol."""

    alphabet: Alphabet
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.probs) != self.alphabet.size:
            raise ValueError(
                f"expected {self.alphabet.size} probabilities, got {len(self.probs)}"
            )
        if any(p < 0.0 or not math.isfinite(p) for p in self.probs):
            raise ValueError("symbol probabilities must be finite and nonnegative")
        if abs(sum(self.probs) - 1.0) > PROB_SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {sum(self.probs)!r}, not 1")

    @classmethod
    def uniform(cls, alphabet_size: int) -> "SourceEnsemble":
        return cls(Alphabet(alphabet_size), (1.0 / alphabet_size,) * alphabet_size)


@dataclass(frozen=True)
class SymbolString:
    """Nonempty sequence of symbols drawn from an indexed alphabet."""

    symbols: tuple[int, ...]
    alphabet: Alphabet

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(int(a) for a in self.symbols))
        if not self.symbols:
            raise ValueError("symbol strings must be nonempty")
        m = self.alphabet.size
        for a in self.symbols:
            if not 0 <= a < m:
                raise ValueError(f"symbol {a} outside alphabet of size {m}")

    @property
    def n(self) -> int:
        return len(self.symbols)

    @classmethod
    def of(cls, symbols: Iterable[int], alphabet_size: int) -> "SymbolString":
        return cls(tuple(symbols), Alphabet(alphabet_size))

    @classmethod
    def from_text(cls, text: str, alphabet_size: int) -> "SymbolString":
        """Parse the line format: base-m digits for m <= 10, else
        comma-separated integers."""
        text = text.strip()
        if not text:
            raise ValueError("empty string")
        if "," in text or alphabet_size > 10:
            symbols = [int(part) for part in text.split(",")]
        else:
            symbols = [int(ch) for ch in text]
        return cls.of(symbols, alphabet_size)

    def to_text(self) -> str:
        if self.alphabet.size <= 10:
            return "".join(str(a) for a in self.symbols)
        return ",".join(str(a) for a in self.symbols)


@dataclass(frozen=True)
class Composition:
    """Symbol-count histogram of a string; identifies its type class."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) < 2:
            raise ValueError("compositions need at least 2 parts")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)


def shannon_entropy(src: SourceEnsemble) -> InfoBits:
    """Entropy -sum(p * log2 p) of the source distribution, in bits."""
    return 0.0 + -sum(p * math.log2(p) for p in src.probs if p > 0.0)


def counts_of(symbols: Sequence[int], alphabet_size: int) -> tuple[int, ...]:
    counts = [0] * alphabet_size
    for a in symbols:
        counts[a] += 1
    return tuple(counts)


def composition_of(s: SymbolString) -> Composition:
    return Composition(counts_of(s.symbols, s.alphabet.size))


def info_of_counts(counts: Sequence[int]) -> InfoBits:
    """-sum over symbols of count*log2(count/n); zero counts contribute 0."""
    n = sum(counts)
    if n < 1:
        raise ValueError("information content needs a nonempty string")
    return 0.0 + -sum(c * math.log2(c / n) for c in counts if c)


def composition_info(c: Composition) -> InfoBits:
    """Information content shared by every string in the type class ``c``."""
    return info_of_counts(c.counts)


def empirical_info_content(s: SymbolString) -> InfoBits:
    """-sum_j log2 of the within-string frequency of each symbol occurrence.

    Depends only on ``composition_of(s)``.
    """
    return info_of_counts(counts_of(s.symbols, s.alphabet.size))


def source_info_content(s: SymbolString, src: SourceEnsemble) -> InfoBits:
    """-sum_j log2 P(s_j) under the source probabilities.

    Raises ZeroProbabilitySymbol if the string uses a symbol with P = 0.
    """
    _check_same_alphabet(s, src)
    total = 0.0
    for a in s.symbols:
        p = src.probs[a]
        if p <= 0.0:
            raise ZeroProbabilitySymbol(f"symbol {a} has probability 0")
        total -= math.log2(p)
    return 0.0 + total


def sequence_probability(s: SymbolString, src: SourceEnsemble) -> float:
    """Product of per-symbol probabilities; 0 when some symbol has P = 0."""
    _check_same_alphabet(s, src)
    prod = 1.0
    for a in s.symbols:
        prod *= src.probs[a]
    return prod


def _check_same_alphabet(s: SymbolString, src: SourceEnsemble) -> None:
    if s.alphabet.size != src.alphabet.size:
        raise ValueError(
            f"string alphabet size {s.alphabet.size} does not match "
            f"source alphabet size {src.alphabet.size}"
        )
