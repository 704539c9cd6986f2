"""Error injection and membership-based detection experiments.

Corruption of a shaped string is detected exactly when the received string
falls outside the shaped set, the same event as a sequential decoder over
the shaped set hitting a zero-probability symbol. The Monte Carlo experiment
measures that detection rate per shaping order; the exact calculator
enumerates every shaped string and every error placement on small instances
and serves as the simulation's oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .classtable import CapacityExceeded, composition_cap
from .model import SourceEnsemble, SymbolString
from .seeding import DOMAIN_DETECTION, SEED_SCHEME_VERSION, substream
from .shaping import ShapingParams, membership_test, tables_for

__all__ = [
    "ErrorModel",
    "DetectionRow",
    "DetectionReport",
    "inject_errors",
    "wilson_interval",
    "run_detection_experiment",
    "detection_rate_exact_small",
]


@dataclass(frozen=True)
class ErrorModel:
    """Channel corruption model applied to one message.

    kind "substitution" flips either an exact number of positions (count) or
    each position independently (probability); a substituted position always
    receives a different symbol. kind "burst" rerandomizes one contiguous
    window of burst_length symbols, which may reproduce the original ones.
    """

    kind: str
    count: int | None = None
    probability: float | None = None
    burst_length: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "substitution":
            if (self.count is None) == (self.probability is None):
                raise ValueError("substitution needs exactly one of count or probability")
            if self.count is not None and self.count < 0:
                raise ValueError(f"error count must be nonnegative, got {self.count}")
            if self.probability is not None and not 0.0 <= self.probability <= 1.0:
                raise ValueError(f"error probability must be in [0, 1], got {self.probability}")
            if self.burst_length is not None:
                raise ValueError("burst_length is only valid for kind 'burst'")
        elif self.kind == "burst":
            if self.burst_length is None or self.burst_length < 1:
                raise ValueError("burst needs a positive burst_length")
            if self.count is not None or self.probability is not None:
                raise ValueError("count and probability are only valid for kind 'substitution'")
        else:
            raise ValueError(f"unknown error model kind {self.kind!r}")

    @classmethod
    def exact_substitutions(cls, count: int) -> "ErrorModel":
        return cls("substitution", count=count)

    @classmethod
    def substitution_rate(cls, probability: float) -> "ErrorModel":
        return cls("substitution", probability=probability)

    @classmethod
    def burst(cls, length: int) -> "ErrorModel":
        return cls("burst", burst_length=length)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.count is not None:
            out["count"] = self.count
        if self.probability is not None:
            out["probability"] = self.probability
        if self.burst_length is not None:
            out["burst_length"] = self.burst_length
        return out


def inject_errors(
    s: SymbolString, em: ErrorModel, rng: np.random.Generator
) -> SymbolString:
    """Corrupt a string under the error model; length is preserved."""
    corrupted = _inject_raw(list(s.symbols), s.alphabet.size, em, rng)
    return SymbolString.of(corrupted, s.alphabet.size)


def _inject_raw(
    symbols: list[int], m: int, em: ErrorModel, rng: np.random.Generator
) -> list[int]:
    n = len(symbols)
    if em.kind == "substitution":
        if em.count is not None:
            if em.count > n:
                raise ValueError(f"cannot place {em.count} errors in {n} symbols")
            if em.count == 0:
                return symbols
            positions = rng.choice(n, size=em.count, replace=False)
        else:
            positions = np.flatnonzero(rng.random(n) < em.probability)
        for j in positions:
            j = int(j)
            symbols[j] = (symbols[j] + 1 + int(rng.integers(m - 1))) % m
        return symbols
    length = em.burst_length
    if length > n:
        raise ValueError(f"burst of {length} does not fit in {n} symbols")
    start = int(rng.integers(n - length + 1))
    window = rng.integers(0, m, size=length)
    symbols[start : start + length] = (int(a) for a in window)
    return symbols


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class DetectionRow:
    shaping_order: int
    trials: int
    detected: int
    rate: float
    ci_low: float
    ci_high: float

    def __post_init__(self) -> None:
        if not 0 <= self.detected <= self.trials:
            raise ValueError("detected count outside [0, trials]")


@dataclass(frozen=True)
class DetectionReport:
    alphabet_size: int
    base_length: int
    source_probs: tuple[float, ...]
    error_model: ErrorModel
    trials: int
    seed: int
    rows: tuple[DetectionRow, ...]

    def to_dict(self) -> dict:
        return {
            "alphabet_size": self.alphabet_size,
            "base_length": self.base_length,
            "source_probs": list(self.source_probs),
            "error_model": self.error_model.to_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "seed_scheme_version": SEED_SCHEME_VERSION,
            "rows": [
                {
                    "k": row.shaping_order,
                    "trials": row.trials,
                    "detected": row.detected,
                    "rate": row.rate,
                    "ci_low": row.ci_low,
                    "ci_high": row.ci_high,
                }
                for row in self.rows
            ],
        }


def run_detection_experiment(
    src: SourceEnsemble,
    base_length: int,
    shaping_orders: Sequence[int],
    error_model: ErrorModel,
    trials: int,
    seed: int,
    cap: int | None = None,
) -> DetectionReport:
    """Monte Carlo detection rates per shaping order.

    Per trial: draw x from the source, shape it, corrupt the shaped string,
    and count a detection when the result leaves the shaped set. Each
    shaping order runs on its own derived random stream, so rows do not
    depend on the order or presence of other entries in ``shaping_orders``.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    m = src.alphabet.size
    probs = np.asarray(src.probs, dtype=float)
    probs = probs / probs.sum()
    rows = []
    for k in shaping_orders:
        params = ShapingParams(m, base_length, k)
        base, shaped = tables_for(params, cap)
        boundary = params.domain_size
        rng = substream(seed, DOMAIN_DETECTION, k)
        samples = rng.choice(m, size=(trials, base_length), p=probs)
        identity = k == 0
        detected = 0
        for i in range(trials):
            x = samples[i].tolist()
            y = x if identity else list(shaped.unrank(base.rank(x)))
            y = _inject_raw(y, m, error_model, rng)
            if not membership_test(y, shaped, boundary):
                detected += 1
        ci_low, ci_high = wilson_interval(detected, trials)
        rows.append(
            DetectionRow(k, trials, detected, detected / trials, ci_low, ci_high)
        )
    return DetectionReport(
        alphabet_size=m,
        base_length=base_length,
        source_probs=src.probs,
        error_model=error_model,
        trials=trials,
        seed=seed,
        rows=tuple(rows),
    )


def detection_rate_exact_small(
    params: ShapingParams, em: ErrorModel, cap: int | None = None
) -> float:
    """Exact detection probability for exact-count substitutions, uniform
    source: full enumeration over shaped strings and error placements."""
    if em.kind != "substitution" or em.count is None:
        raise ValueError("exact rates are only defined for exact-count substitution models")
    error_count = em.count
    n = params.shaped_length
    if error_count > n:
        raise ValueError(f"cannot place {error_count} errors in {n} symbols")
    m = params.alphabet_size
    limit = composition_cap() if cap is None else cap
    space = m**params.shaped_length
    placements = math.comb(n, error_count) * (m - 1) ** error_count
    work = params.domain_size * placements
    if space > limit or work > limit:
        raise CapacityExceeded(
            f"exact enumeration needs {max(space, work)} steps, over the cap of {limit}"
        )
    _, shaped = tables_for(params, cap)
    boundary = params.domain_size
    members = {shaped.unrank(r) for r in range(boundary)}
    detected = 0
    for y in members:
        for positions in combinations(range(n), error_count):
            for deltas in product(range(1, m), repeat=error_count):
                corrupted = list(y)
                for j, d in zip(positions, deltas):
                    corrupted[j] = (corrupted[j] + d) % m
                if tuple(corrupted) not in members:
                    detected += 1
    return detected / (boundary * placements)
