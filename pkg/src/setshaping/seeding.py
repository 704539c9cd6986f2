"""Deterministic derivation of random streams for experiments.

Every randomized experiment draws from ``substream(seed, domain, *indices)``.
The stream is a PCG64 generator keyed by numpy's SeedSequence on the tuple
(SEED_SCHEME_VERSION, seed, domain, *indices), so independent parts of an
experiment (for example each shaping order in a sweep) get their own
reproducible stream and may run in any order, or in parallel, without
changing results. Bump SEED_SCHEME_VERSION if the derivation ever changes;
identical (version, seed, path) always replays the identical stream.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "SEED_SCHEME_VERSION",
    "DOMAIN_CODEC_BENCH",
    "DOMAIN_DETECTION",
    "DOMAIN_SHAPED_INFO",
    "substream",
]

SEED_SCHEME_VERSION = 1

DOMAIN_CODEC_BENCH = 1
DOMAIN_DETECTION = 2
DOMAIN_SHAPED_INFO = 3


def substream(seed: int, *path: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    seq = np.random.SeedSequence([SEED_SCHEME_VERSION, int(seed), *map(int, path)])
    return np.random.Generator(np.random.PCG64(seq))
