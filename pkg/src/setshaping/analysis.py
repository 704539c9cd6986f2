"""Exact aggregate analysis of shaping, without enumerating strings.

The mean information content of the shaped set is computed by walking the
class table of the longer length in canonical order and spending a budget of
m^N strings: whole classes are taken while they fit and the class straddling
the boundary contributes pro rata, which is exact because information content
is constant within a class. Weights are exact big-integer ratios converted to
float once per class, so nothing underflows even at large N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classtable import build_class_table
from .model import SourceEnsemble
from .seeding import DOMAIN_SHAPED_INFO, substream
from .shaping import ShapingParams, tables_for

__all__ = [
    "ShapingTableRow",
    "MonteCarloEstimate",
    "average_info_unshaped",
    "average_info_shaped",
    "shaping_table",
    "average_info_shaped_nonuniform",
]


@dataclass(frozen=True)
class ShapingTableRow:
    shaping_order: int
    string_length: int
    mean_info_bits: float


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean_info_bits: float
    std_error: float
    trials: int
    seed: int


def average_info_unshaped(alphabet_size: int, length: int, cap: int | None = None) -> float:
    """Mean information content over all m^n strings of length n, with each
    string equally likely (uniform source)."""
    table = build_class_table(length, alphabet_size, cap)
    total = float(table.total)
    return 0.0 + sum(e.count / total * e.info for e in table.entries)


def average_info_shaped(params: ShapingParams, cap: int | None = None) -> float:
    """Mean information content over the shaped set: the m^N canonically
    first strings of length N+K, each equally likely."""
    _, shaped = tables_for(params, cap)
    budget = params.domain_size
    remaining = budget
    acc = 0.0
    for entry in shaped.entries:
        take = entry.count if entry.count <= remaining else remaining
        acc += (take / budget) * entry.info
        remaining -= take
        if not remaining:
            break
    return 0.0 + acc


def shaping_table(
    alphabet_size: int, base_length: int, max_shaping_order: int, cap: int | None = None
) -> list[ShapingTableRow]:
    """One row per shaping order K in 0..max: (K, N+K, mean shaped info)."""
    if max_shaping_order < 0:
        raise ValueError(f"max shaping order must be nonnegative, got {max_shaping_order}")
    rows = []
    for k in range(max_shaping_order + 1):
        params = ShapingParams(alphabet_size, base_length, k)
        rows.append(
            ShapingTableRow(k, params.shaped_length, average_info_shaped(params, cap))
        )
    return rows


def average_info_shaped_nonuniform(
    params: ShapingParams,
    src: SourceEnsemble,
    trials: int,
    seed: int,
    cap: int | None = None,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of the mean shaped information content when the
    base strings are drawn from an arbitrary source.

    Each sampled string's shaped class is found by looking up its canonical
    rank in the longer table, which gives composition_info(shape(x)) without
    materializing the shaped string.
    """
    if src.alphabet.size != params.alphabet_size:
        raise ValueError("source alphabet does not match shaping params")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    base, shaped = tables_for(params, cap)
    rng = substream(seed, DOMAIN_SHAPED_INFO)
    probs = np.asarray(src.probs, dtype=float)
    probs = probs / probs.sum()
    samples = rng.choice(params.alphabet_size, size=(trials, params.base_length), p=probs)
    values = np.empty(trials, dtype=float)
    for i in range(trials):
        r = base.rank(samples[i].tolist())
        values[i] = shaped.locate(r).info
    mean = float(values.mean())
    if trials > 1:
        std_error = float(values.std(ddof=1) / math.sqrt(trials))
    else:
        std_error = float("nan")
    return MonteCarloEstimate(mean, std_error, trials, seed)
