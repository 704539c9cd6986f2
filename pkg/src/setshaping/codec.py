"""Adaptive order-0 arithmetic coding and the raw-vs-shaped benchmark.

The coder is a classic binary arithmetic coder with 64-bit low/high
registers. Renormalization emits a bit whenever the top bits of low and high
agree and defers straddle bits (the carry mechanism) until they resolve, so
the emitted stream never needs rewriting. The probability model is adaptive:
symbol a is coded with probability (count(a) + alpha) / (t + m * alpha),
where t is the number of symbols coded so far and alpha is an additive
smoothing constant. Frequencies are held as exact integers (alpha is taken
as a rational), so encoder and decoder stay bit-exact.

Emitted payloads are within 2 bits of the model's ideal code length plus the
2-bit termination flush; see TERMINATION_BITS.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import SourceEnsemble, SymbolString
from .seeding import DOMAIN_CODEC_BENCH, SEED_SCHEME_VERSION, substream
from .shaping import ShapingParams, tables_for

__all__ = [
    "CodecModelConfig",
    "EncodedBits",
    "MalformedBitstream",
    "ArmStats",
    "BenchReport",
    "STREAM_VERSION",
    "TERMINATION_BITS",
    "encode",
    "decode",
    "ideal_code_length",
    "pack_frame",
    "unpack_frame",
    "decode_frame",
    "run_codec_benchmark",
]

STATE_BITS = 64
_FULL = 1 << STATE_BITS
_HALF = _FULL >> 1
_QUARTER = _FULL >> 2
_MASK = _FULL - 1
# Largest model total that still guarantees every symbol a nonzero slice of
# the coding range.
_MAX_TOTAL = _QUARTER + 2

# The finish step emits two bits naming a dyadic point inside the final
# interval; everything past them decodes as zeros.
TERMINATION_BITS = 2

STREAM_VERSION = 1
_HEADER_LEN = 6  # version byte, 4-byte big-endian symbol count, alphabet byte


class MalformedBitstream(ValueError):
    """Bitstream violates the frame header or the decoder's range invariant."""


@dataclass(frozen=True)
class CodecModelConfig:
    """Alphabet size plus the additive smoothing constant of the model."""

    alphabet_size: int
    smoothing: Fraction | int | float = 1

    def __post_init__(self) -> None:
        if self.alphabet_size < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.alphabet_size}")
        if Fraction(self.smoothing) <= 0:
            raise ValueError(f"smoothing must be positive, got {self.smoothing}")


class _AdaptiveModel:
    """Integer frequency view of the smoothed adaptive model.

    freq(a) = count(a) * den + num with smoothing = num / den, which keeps
    every cumulative boundary exact.
    """

    def __init__(self, cfg: CodecModelConfig):
        alpha = Fraction(cfg.smoothing)
        self.num = alpha.numerator
        self.den = alpha.denominator
        self.m = cfg.alphabet_size
        self.counts = [0] * self.m
        self.total = self.m * self.num

    def interval(self, symbol: int) -> tuple[int, int, int]:
        if self.total > _MAX_TOTAL:
            raise ValueError("model total exceeds the coder's frequency capacity")
        den, num = self.den, self.num
        lo = 0
        for b in range(symbol):
            lo += self.counts[b] * den + num
        return lo, lo + self.counts[symbol] * den + num, self.total

    def log2_prob(self, symbol: int) -> float:
        return math.log2(self.counts[symbol] * self.den + self.num) - math.log2(self.total)

    def update(self, symbol: int) -> None:
        self.counts[symbol] += 1
        self.total += self.den


class _BitWriter:
    def __init__(self) -> None:
        self.buf = bytearray()
        self.acc = 0
        self.nbits = 0
        self.bit_length = 0

    def write(self, bit: int) -> None:
        self.acc = (self.acc << 1) | bit
        self.nbits += 1
        self.bit_length += 1
        if self.nbits == 8:
            self.buf.append(self.acc)
            self.acc = 0
            self.nbits = 0

    def getvalue(self) -> bytes:
        if self.nbits:
            return bytes(self.buf) + bytes([self.acc << (8 - self.nbits)])
        return bytes(self.buf)


class _BitReader:
    """Big-endian bit reader; reads past the end return 0."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self) -> int:
        i = self.pos
        self.pos = i + 1
        byte = i >> 3
        if byte >= len(self.data):
            return 0
        return (self.data[byte] >> (7 - (i & 7))) & 1


@dataclass(frozen=True)
class EncodedBits:
    """Arithmetic-coded payload: packed bytes plus the exact bit count."""

    data: bytes
    bit_length: int

    def __post_init__(self) -> None:
        if len(self.data) != (self.bit_length + 7) // 8:
            raise ValueError("data length does not match bit length")


class _Encoder:
    def __init__(self, writer: _BitWriter):
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.writer = writer

    def encode(self, lo: int, hi: int, total: int) -> None:
        span = self.high - self.low + 1
        self.high = self.low + hi * span // total - 1
        self.low = self.low + lo * span // total
        while True:
            if self.high < _HALF:
                self._emit(0)
            elif self.low >= _HALF:
                self._emit(1)
                self.low -= _HALF
                self.high -= _HALF
            elif self.low >= _QUARTER and self.high < _HALF + _QUARTER:
                self.pending += 1
                self.low -= _QUARTER
                self.high -= _QUARTER
            else:
                return
            self.low <<= 1
            self.high = (self.high << 1) | 1

    def _emit(self, bit: int) -> None:
        self.writer.write(bit)
        while self.pending:
            self.writer.write(bit ^ 1)
            self.pending -= 1

    def finish(self) -> None:
        # The interval always contains 1/4 (when low < 1/4) or 1/2 of the
        # register frame, so two bits pin a decodable point.
        if self.low < _QUARTER:
            self._emit(0)
            self._emit(1)
        else:
            self._emit(1)
            self._emit(0)


class _Decoder:
    def __init__(self, reader: _BitReader):
        self.low = 0
        self.high = _MASK
        self.reader = reader
        code = 0
        for _ in range(STATE_BITS):
            code = (code << 1) | reader.read()
        self.code = code

    def decode(self, model: _AdaptiveModel) -> int:
        total = model.total
        if total > _MAX_TOTAL:
            raise ValueError("model total exceeds the coder's frequency capacity")
        span = self.high - self.low + 1
        value = ((self.code - self.low + 1) * total - 1) // span
        den, num = model.den, model.num
        lo = 0
        symbol = model.m - 1
        for b in range(model.m):
            hi = lo + model.counts[b] * den + num
            if value < hi:
                symbol = b
                break
            lo = hi
        else:
            raise MalformedBitstream("decoded value outside the frequency table")
        hi = lo + model.counts[symbol] * den + num
        self.high = self.low + hi * span // total - 1
        self.low = self.low + lo * span // total
        while True:
            if self.high < _HALF:
                pass
            elif self.low >= _HALF:
                self.low -= _HALF
                self.high -= _HALF
                self.code -= _HALF
            elif self.low >= _QUARTER and self.high < _HALF + _QUARTER:
                self.low -= _QUARTER
                self.high -= _QUARTER
                self.code -= _QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1
            self.code = (self.code << 1) | self.reader.read()
        if not self.low <= self.code <= self.high:
            raise MalformedBitstream("code left the arithmetic decode range")
        return symbol


def encode(s: SymbolString, cfg: CodecModelConfig | None = None) -> EncodedBits:
    """Arithmetic-code a string under the adaptive model."""
    cfg = cfg or CodecModelConfig(s.alphabet.size)
    if s.alphabet.size != cfg.alphabet_size:
        raise ValueError("string alphabet does not match codec config")
    return encode_symbols(s.symbols, cfg)


def encode_symbols(symbols: Sequence[int], cfg: CodecModelConfig) -> EncodedBits:
    model = _AdaptiveModel(cfg)
    writer = _BitWriter()
    coder = _Encoder(writer)
    for a in symbols:
        coder.encode(*model.interval(a))
        model.update(a)
    coder.finish()
    return EncodedBits(writer.getvalue(), writer.bit_length)


def decode(
    bits: EncodedBits | bytes, n: int, cfg: CodecModelConfig
) -> SymbolString:
    """Exact inverse of :func:`encode` given the symbol count out of band."""
    if n < 1:
        raise ValueError(f"symbol count must be positive, got {n}")
    data = bits.data if isinstance(bits, EncodedBits) else bytes(bits)
    model = _AdaptiveModel(cfg)
    coder = _Decoder(_BitReader(data))
    out = []
    for _ in range(n):
        a = coder.decode(model)
        model.update(a)
        out.append(a)
    return SymbolString.of(out, cfg.alphabet_size)


def ideal_code_length(s: SymbolString, cfg: CodecModelConfig | None = None) -> float:
    """-log2 of the adaptive model's probability of s, in bits."""
    cfg = cfg or CodecModelConfig(s.alphabet.size)
    if s.alphabet.size != cfg.alphabet_size:
        raise ValueError("string alphabet does not match codec config")
    return ideal_code_length_symbols(s.symbols, cfg)


def ideal_code_length_symbols(symbols: Sequence[int], cfg: CodecModelConfig) -> float:
    model = _AdaptiveModel(cfg)
    total = 0.0
    for a in symbols:
        total -= model.log2_prob(a)
        model.update(a)
    return 0.0 + total


def pack_frame(bits: EncodedBits, n: int, alphabet_size: int) -> bytes:
    """Single-sequence container: version byte, 4-byte big-endian symbol
    count, alphabet-size byte, then the payload bits (zero-padded)."""
    if not 1 <= n < 1 << 32:
        raise ValueError(f"symbol count {n} does not fit the frame header")
    if not 2 <= alphabet_size <= 255:
        raise ValueError(f"alphabet size {alphabet_size} does not fit one byte")
    return (
        bytes([STREAM_VERSION])
        + n.to_bytes(4, "big")
        + bytes([alphabet_size])
        + bits.data
    )


def unpack_frame(raw: bytes) -> tuple[int, int, bytes]:
    """(symbol count, alphabet size, payload bytes) of a packed frame."""
    if len(raw) < _HEADER_LEN:
        raise MalformedBitstream(f"frame shorter than the {_HEADER_LEN}-byte header")
    if raw[0] != STREAM_VERSION:
        raise MalformedBitstream(f"unsupported stream version {raw[0]}")
    n = int.from_bytes(raw[1:5], "big")
    alphabet_size = raw[5]
    if n < 1:
        raise MalformedBitstream("frame declares an empty string")
    if alphabet_size < 2:
        raise MalformedBitstream(f"frame declares alphabet size {alphabet_size}")
    return n, alphabet_size, raw[_HEADER_LEN:]


def decode_frame(raw: bytes, cfg: CodecModelConfig | None = None) -> SymbolString:
    """Decode a packed frame; cfg defaults to the header's alphabet with
    default smoothing."""
    n, alphabet_size, payload = unpack_frame(raw)
    if cfg is None:
        cfg = CodecModelConfig(alphabet_size)
    elif cfg.alphabet_size != alphabet_size:
        raise MalformedBitstream(
            f"frame alphabet size {alphabet_size} does not match "
            f"configured {cfg.alphabet_size}"
        )
    return decode(payload, n, cfg)


@dataclass(frozen=True)
class ArmStats:
    mean_emitted_bits: float
    se_emitted_bits: float
    mean_ideal_bits: float
    se_ideal_bits: float


@dataclass(frozen=True)
class BenchReport:
    """Raw-vs-shaped coding comparison; emitted lengths are payload bits
    before byte padding, excluding the frame header."""

    alphabet_size: int
    base_length: int
    shaping_order: int
    source_probs: tuple[float, ...]
    smoothing: float
    trials: int
    seed: int
    raw: ArmStats
    shaped: ArmStats

    def to_dict(self) -> dict:
        return {
            "alphabet_size": self.alphabet_size,
            "base_length": self.base_length,
            "shaping_order": self.shaping_order,
            "source_probs": list(self.source_probs),
            "smoothing": self.smoothing,
            "trials": self.trials,
            "seed": self.seed,
            "seed_scheme_version": SEED_SCHEME_VERSION,
            "arms": {
                "raw": vars(self.raw).copy(),
                "shaped": vars(self.shaped).copy(),
            },
        }


def _arm_stats(emitted: np.ndarray, ideal: np.ndarray) -> ArmStats:
    trials = len(emitted)
    if trials > 1:
        se_e = float(emitted.std(ddof=1) / math.sqrt(trials))
        se_i = float(ideal.std(ddof=1) / math.sqrt(trials))
    else:
        se_e = se_i = 0.0
    return ArmStats(float(emitted.mean()), se_e, float(ideal.mean()), se_i)


def run_codec_benchmark(
    params: ShapingParams,
    src: SourceEnsemble,
    trials: int,
    seed: int,
    cfg: CodecModelConfig | None = None,
    cap: int | None = None,
) -> BenchReport:
    """Per trial, draw x from the source and code both x and shape(x) with a
    fresh adaptive model; report mean emitted and ideal lengths per arm."""
    if src.alphabet.size != params.alphabet_size:
        raise ValueError("source alphabet does not match shaping params")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    cfg = cfg or CodecModelConfig(params.alphabet_size)
    if cfg.alphabet_size != params.alphabet_size:
        raise ValueError("codec config alphabet does not match shaping params")
    base, shaped = tables_for(params, cap)
    rng = substream(seed, DOMAIN_CODEC_BENCH)
    probs = np.asarray(src.probs, dtype=float)
    probs = probs / probs.sum()
    samples = rng.choice(params.alphabet_size, size=(trials, params.base_length), p=probs)
    raw_emitted = np.empty(trials)
    raw_ideal = np.empty(trials)
    shp_emitted = np.empty(trials)
    shp_ideal = np.empty(trials)
    identity = params.shaping_order == 0
    for i in range(trials):
        x = samples[i].tolist()
        raw_emitted[i] = encode_symbols(x, cfg).bit_length
        raw_ideal[i] = ideal_code_length_symbols(x, cfg)
        y = x if identity else shaped.unrank(base.rank(x))
        shp_emitted[i] = encode_symbols(y, cfg).bit_length
        shp_ideal[i] = ideal_code_length_symbols(y, cfg)
    return BenchReport(
        alphabet_size=params.alphabet_size,
        base_length=params.base_length,
        shaping_order=params.shaping_order,
        source_probs=src.probs,
        smoothing=float(Fraction(cfg.smoothing)),
        trials=trials,
        seed=seed,
        raw=_arm_stats(raw_emitted, raw_ideal),
        shaped=_arm_stats(shp_emitted, shp_ideal),
    )
