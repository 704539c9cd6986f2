"""FastAPI service wrapping the shaping toolkit.

Long-running deployments amortize class-table construction: tables are
memoized per (length, alphabet) inside the process, so repeated requests on
the same parameters only pay the table cost once. Domain errors map to HTTP
400, the composition-capacity cap to HTTP 422.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import shaping_table
from ..classtable import CapacityExceeded
from ..codec import CodecModelConfig, run_codec_benchmark
from ..model import Alphabet, SourceEnsemble, SymbolString
from ..seeding import SEED_SCHEME_VERSION
from ..shaping import NotInShapedSet, ShapingParams, is_in_shaped_set, shape, unshape
from ..testability import ErrorModel, run_detection_experiment
from . import schemas

SOURCE_SUM_TOLERANCE = 1e-9


def _source_from(probs: list[float] | None, m: int) -> SourceEnsemble:
    if probs is None:
        return SourceEnsemble.uniform(m)
    if len(probs) != m:
        raise ValueError(f"source needs {m} probabilities, got {len(probs)}")
    if any(p < 0 for p in probs):
        raise ValueError("source probabilities must be nonnegative")
    total = sum(probs)
    if abs(total - 1.0) > SOURCE_SUM_TOLERANCE:
        raise ValueError(f"source probabilities sum to {total!r}, not 1")
    return SourceEnsemble(Alphabet(m), tuple(p / total for p in probs))


def _error_model_from(req: schemas.TestabilityRequest) -> ErrorModel:
    if req.burst_length is not None:
        return ErrorModel.burst(req.burst_length)
    if req.error_probability is not None:
        return ErrorModel.substitution_rate(req.error_probability)
    return ErrorModel.exact_substitutions(req.error_count if req.error_count is not None else 1)


def create_app() -> FastAPI:
    app = FastAPI(title="setshaping", version=__version__)

    @app.exception_handler(CapacityExceeded)
    async def capacity_handler(request: Request, exc: CapacityExceeded):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(req: schemas.AnalyzeRequest):
        rows = shaping_table(req.alphabet_size, req.base_length, req.max_shaping_order)
        return schemas.AnalyzeResponse(
            alphabet_size=req.alphabet_size,
            base_length=req.base_length,
            max_shaping_order=req.max_shaping_order,
            rows=[
                schemas.AnalyzeRow(
                    k=r.shaping_order, length=r.string_length, mean_info_bits=r.mean_info_bits
                )
                for r in rows
            ],
        )

    @app.post("/shape", response_model=schemas.ShapeResponse)
    def shape_strings(req: schemas.ShapeRequest):
        out = []
        for text in req.strings:
            s = SymbolString.from_text(text, req.alphabet_size)
            params = ShapingParams(req.alphabet_size, s.n, req.shaping_order)
            out.append(shape(s, params).to_text())
        return schemas.ShapeResponse(strings=out)

    @app.post("/unshape", response_model=schemas.UnshapeResponse)
    def unshape_strings(req: schemas.ShapeRequest):
        results = []
        detections = 0
        for text in req.strings:
            s = SymbolString.from_text(text, req.alphabet_size)
            base_length = s.n - req.shaping_order
            if base_length < 1:
                raise ValueError(f"length {s.n} too short for shaping order {req.shaping_order}")
            params = ShapingParams(req.alphabet_size, base_length, req.shaping_order)
            try:
                results.append(schemas.UnshapeResult(string=unshape(s, params).to_text()))
            except NotInShapedSet as exc:
                detections += 1
                results.append(schemas.UnshapeResult(error=str(exc)))
        return schemas.UnshapeResponse(results=results, detections=detections)

    @app.post("/membership", response_model=schemas.MembershipResponse)
    def membership(req: schemas.MembershipRequest):
        params = ShapingParams(req.alphabet_size, req.base_length, req.shaping_order)
        member = []
        for text in req.strings:
            s = SymbolString.from_text(text, req.alphabet_size)
            member.append(is_in_shaped_set(s, params))
        return schemas.MembershipResponse(member=member)

    @app.post("/codec/benchmark", response_model=schemas.CodecBenchResponse)
    def codec_benchmark(req: schemas.CodecBenchRequest):
        report = run_codec_benchmark(
            ShapingParams(req.alphabet_size, req.base_length, req.shaping_order),
            _source_from(req.source, req.alphabet_size),
            req.trials,
            req.seed,
            CodecModelConfig(req.alphabet_size, req.smoothing),
        )
        return schemas.CodecBenchResponse(
            alphabet_size=report.alphabet_size,
            base_length=report.base_length,
            shaping_order=report.shaping_order,
            source_probs=list(report.source_probs),
            smoothing=report.smoothing,
            trials=report.trials,
            seed=report.seed,
            seed_scheme_version=SEED_SCHEME_VERSION,
            raw=schemas.ArmStatsOut(**vars(report.raw)),
            shaped=schemas.ArmStatsOut(**vars(report.shaped)),
        )

    @app.post("/testability", response_model=schemas.TestabilityResponse)
    def testability(req: schemas.TestabilityRequest):
        report = run_detection_experiment(
            _source_from(req.source, req.alphabet_size),
            req.base_length,
            req.shaping_orders,
            _error_model_from(req),
            req.trials,
            req.seed,
        )
        payload = report.to_dict()
        return schemas.TestabilityResponse(**payload)

    return app


app = create_app()
