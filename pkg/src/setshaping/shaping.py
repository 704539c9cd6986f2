"""The length-increasing bijection between X^N and the shaped set Y^(N+K).

A length-N string is mapped to the string with the same canonical rank among
length-(N+K) strings. The image (the shaped set) is the m^N lowest-ranked,
hence lowest-information-content, strings of the longer space. Receiving a
string outside the shaped set is therefore proof of corruption, which is what
the membership test exposes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .classtable import ClassTable, build_class_table
from .model import SymbolString, counts_of

__all__ = ["ShapingParams", "NotInShapedSet", "shape", "unshape", "is_in_shaped_set"]


class NotInShapedSet(ValueError):
    """Received string is not in the shaped set; decoding it is impossible."""


@dataclass(frozen=True)
class ShapingParams:
    """Alphabet size m, base length N, and shaping order K (symbols added)."""

    alphabet_size: int
    base_length: int
    shaping_order: int

    def __post_init__(self) -> None:
        if self.alphabet_size < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.alphabet_size}")
        if self.base_length < 1:
            raise ValueError(f"base length must be at least 1, got {self.base_length}")
        if self.shaping_order < 0:
            raise ValueError(f"shaping order must be nonnegative, got {self.shaping_order}")

    @property
    def shaped_length(self) -> int:
        return self.base_length + self.shaping_order

    @property
    def domain_size(self) -> int:
        return self.alphabet_size**self.base_length


def tables_for(params: ShapingParams, cap: int | None = None) -> tuple[ClassTable, ClassTable]:
    """(base table, shaped table) for the given parameters."""
    base = build_class_table(params.base_length, params.alphabet_size, cap)
    if params.shaping_order == 0:
        return base, base
    return base, build_class_table(params.shaped_length, params.alphabet_size, cap)


def shape(x: SymbolString, params: ShapingParams) -> SymbolString:
    """Map x to the length-(N+K) string of equal canonical rank."""
    _check_alphabet(x, params)
    if x.n != params.base_length:
        raise ValueError(f"expected length {params.base_length}, got {x.n}")
    base, shaped = tables_for(params)
    if params.shaping_order == 0:
        return x
    return SymbolString.of(shaped.unrank(base.rank(x.symbols)), params.alphabet_size)


def unshape(y: SymbolString, params: ShapingParams) -> SymbolString:
    """Invert :func:`shape`; raises NotInShapedSet for non-member strings,
    which is the error-detection signal."""
    _check_alphabet(y, params)
    if y.n != params.shaped_length:
        raise ValueError(f"expected length {params.shaped_length}, got {y.n}")
    base, shaped = tables_for(params)
    r = shaped.rank(y.symbols)
    if r >= params.domain_size:
        raise NotInShapedSet(
            f"rank {r} is outside the shaped set of size {params.domain_size}"
        )
    if params.shaping_order == 0:
        return y
    return SymbolString.of(base.unrank(r), params.alphabet_size)


def is_in_shaped_set(y: SymbolString, params: ShapingParams) -> bool:
    """Whether y belongs to the shaped set (canonical rank below m^N)."""
    _check_alphabet(y, params)
    if y.n != params.shaped_length:
        raise ValueError(f"expected length {params.shaped_length}, got {y.n}")
    _, shaped = tables_for(params)
    return membership_test(y.symbols, shaped, params.domain_size)


def membership_test(symbols: Sequence[int], shaped: ClassTable, boundary: int) -> bool:
    """Membership via the class layout: only the single class straddling the
    boundary needs a within-class rank; all others are decided by offsets."""
    entry = shaped.entry_for(counts_of(symbols, shaped.m))
    if entry.start_rank + entry.count <= boundary:
        return True
    if entry.start_rank >= boundary:
        return False
    return shaped.rank(symbols) < boundary


def _check_alphabet(s: SymbolString, params: ShapingParams) -> None:
    if s.alphabet.size != params.alphabet_size:
        raise ValueError(
            f"string alphabet size {s.alphabet.size} does not match "
            f"params alphabet size {params.alphabet_size}"
        )
