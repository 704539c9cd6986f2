"""Pydantic request/response models for the HTTP service.

Strings travel in the same text form the CLI files use: base-m digits for
alphabets up to 10 symbols, comma-separated integers above that.
"""
from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class AnalyzeRequest(BaseModel):
    alphabet_size: int = Field(ge=2)
    base_length: int = Field(ge=1)
    max_shaping_order: int = Field(ge=0)


class AnalyzeRow(BaseModel):
    k: int
    length: int
    mean_info_bits: float


class AnalyzeResponse(BaseModel):
    alphabet_size: int
    base_length: int
    max_shaping_order: int
    rows: list[AnalyzeRow]


class ShapeRequest(BaseModel):
    alphabet_size: int = Field(ge=2)
    shaping_order: int = Field(ge=0)
    strings: list[str] = Field(min_length=1)


class ShapeResponse(BaseModel):
    strings: list[str]


class UnshapeResult(BaseModel):
    string: str | None = None
    error: str | None = None


class UnshapeResponse(BaseModel):
    results: list[UnshapeResult]
    detections: int


class MembershipRequest(BaseModel):
    alphabet_size: int = Field(ge=2)
    base_length: int = Field(ge=1)
    shaping_order: int = Field(ge=0)
    strings: list[str] = Field(min_length=1)


class MembershipResponse(BaseModel):
    member: list[bool]


class ArmStatsOut(BaseModel):
    mean_emitted_bits: float
    se_emitted_bits: float
    mean_ideal_bits: float
    se_ideal_bits: float


class CodecBenchRequest(BaseModel):
    alphabet_size: int = Field(ge=2)
    base_length: int = Field(ge=1)
    shaping_order: int = Field(ge=0)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0, default=0)
    source: list[float] | None = None
    smoothing: float = Field(gt=0, default=1.0)


class CodecBenchResponse(BaseModel):
    alphabet_size: int
    base_length: int
    shaping_order: int
    source_probs: list[float]
    smoothing: float
    trials: int
    seed: int
    seed_scheme_version: int
    raw: ArmStatsOut
    shaped: ArmStatsOut


class TestabilityRequest(BaseModel):
    alphabet_size: int = Field(ge=2)
    base_length: int = Field(ge=1)
    shaping_orders: list[int] = Field(min_length=1)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0, default=0)
    source: list[float] | None = None
    error_count: int | None = 1
    error_probability: float | None = None
    burst_length: int | None = None


class DetectionRowOut(BaseModel):
    k: int
    trials: int
    detected: int
    rate: float
    ci_low: float
    ci_high: float


class TestabilityResponse(BaseModel):
    alphabet_size: int
    base_length: int
    source_probs: list[float]
    error_model: dict
    trials: int
    seed: int
    seed_scheme_version: int
    rows: list[DetectionRowOut]
