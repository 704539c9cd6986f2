"""Command-line harness for shaping, analysis, and the experiments.

Exit codes: 0 success, 1 membership failures during unshape, 2 invalid
flags or malformed input, 3 capacity cap exceeded. All floating-point
output is printed with 6 significant digits, identically in CSV and JSON.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .analysis import shaping_table
from .classtable import CapacityExceeded
from .codec import (
    CodecModelConfig,
    MalformedBitstream,
    decode_frame,
    encode_symbols,
    pack_frame,
    run_codec_benchmark,
)
from .model import Alphabet, SourceEnsemble, SymbolString
from .shaping import NotInShapedSet, ShapingParams, shape, unshape
from .testability import ErrorModel, run_detection_experiment

SOURCE_SUM_TOLERANCE = 1e-9


class CliError(Exception):
    """Invalid flag values or malformed input files; maps to exit code 2."""


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _round6(obj):
    """Round every float to 6 significant digits, recursively."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round6(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round6(v) for v in obj]
    return obj


def _emit(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_json(path: str | None, payload: dict) -> None:
    _emit(path, json.dumps(_round6(payload), indent=2) + "\n")


def _alphabet_size(args) -> int:
    if args.alphabet < 2:
        raise CliError(f"--alphabet must be at least 2, got {args.alphabet}")
    return args.alphabet


def _parse_source(text: str | None, m: int) -> SourceEnsemble:
    if text is None:
        return SourceEnsemble.uniform(m)
    try:
        probs = [float(p) for p in text.split(",")]
    except ValueError as e:
        raise CliError(f"--source must be comma-separated numbers: {e}") from None
    if len(probs) != m:
        raise CliError(f"--source needs {m} probabilities, got {len(probs)}")
    if any(p < 0 for p in probs):
        raise CliError("--source probabilities must be nonnegative")
    total = sum(probs)
    if abs(total - 1.0) > SOURCE_SUM_TOLERANCE:
        raise CliError(f"--source probabilities sum to {total!r}, not 1")
    return SourceEnsemble(Alphabet(m), tuple(p / total for p in probs))


def _parse_k_list(text: str) -> list[int]:
    try:
        ks = [int(part) for part in text.split(",")]
    except ValueError:
        raise CliError(f"--k-list must be comma-separated integers, got {text!r}") from None
    if any(k < 0 for k in ks):
        raise CliError("--k-list entries must be nonnegative")
    return ks


def _read_lines(path: str) -> list[str]:
    try:
        raw = Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from None
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _parse_line(line: str, lineno: int, m: int) -> SymbolString:
    try:
        return SymbolString.from_text(line, m)
    except ValueError as e:
        raise CliError(f"line {lineno}: {e}") from None


def cmd_analyze(args) -> int:
    m = _alphabet_size(args)
    if args.n < 1:
        raise CliError(f"--n must be at least 1, got {args.n}")
    if args.k_max < 0:
        raise CliError(f"--k-max must be nonnegative, got {args.k_max}")
    rows = shaping_table(m, args.n, args.k_max)
    if args.format == "json":
        _emit_json(
            args.out,
            {
                "alphabet_size": m,
                "base_length": args.n,
                "max_shaping_order": args.k_max,
                "rows": [
                    {
                        "k": r.shaping_order,
                        "length": r.string_length,
                        "mean_info_bits": r.mean_info_bits,
                    }
                    for r in rows
                ],
            },
        )
    else:
        lines = ["k,length,mean_info_bits"]
        lines += [
            f"{r.shaping_order},{r.string_length},{_fmt(r.mean_info_bits)}" for r in rows
        ]
        _emit(args.out, "\n".join(lines) + "\n")
    return 0


def _transform_lines(args, inverse: bool) -> int:
    m = _alphabet_size(args)
    if args.k < 0:
        raise CliError(f"--k must be nonnegative, got {args.k}")
    detections = 0
    out_lines = []
    for lineno, line in enumerate(_read_lines(args.infile), start=1):
        s = _parse_line(line, lineno, m)
        if inverse:
            base_length = s.n - args.k
            if base_length < 1:
                raise CliError(f"line {lineno}: length {s.n} too short for k={args.k}")
            params = ShapingParams(m, base_length, args.k)
            try:
                out_lines.append(unshape(s, params).to_text())
            except NotInShapedSet:
                detections += 1
                out_lines.append(f"ERROR:{lineno}")
        else:
            params = ShapingParams(m, s.n, args.k)
            out_lines.append(shape(s, params).to_text())
    _emit(args.out, "\n".join(out_lines) + "\n" if out_lines else "")
    return 1 if detections else 0


def cmd_shape(args) -> int:
    return _transform_lines(args, inverse=False)


def cmd_unshape(args) -> int:
    return _transform_lines(args, inverse=True)


def cmd_codec_bench(args) -> int:
    m = _alphabet_size(args)
    if args.n < 1:
        raise CliError(f"--n must be at least 1, got {args.n}")
    if args.k < 0:
        raise CliError(f"--k must be nonnegative, got {args.k}")
    if args.trials < 1:
        raise CliError(f"--trials must be positive, got {args.trials}")
    if args.alpha <= 0:
        raise CliError(f"--alpha must be positive, got {args.alpha}")
    src = _parse_source(args.source, m)
    report = run_codec_benchmark(
        ShapingParams(m, args.n, args.k),
        src,
        args.trials,
        args.seed,
        CodecModelConfig(m, args.alpha),
    )
    if args.format == "json":
        _emit_json(args.out, report.to_dict())
    else:
        lines = ["arm,trials,mean_emitted_bits,se_emitted_bits,mean_ideal_bits,se_ideal_bits"]
        for name, arm in (("raw", report.raw), ("shaped", report.shaped)):
            lines.append(
                f"{name},{report.trials},{_fmt(arm.mean_emitted_bits)},"
                f"{_fmt(arm.se_emitted_bits)},{_fmt(arm.mean_ideal_bits)},"
                f"{_fmt(arm.se_ideal_bits)}"
            )
        _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_testability(args) -> int:
    m = _alphabet_size(args)
    if args.n < 1:
        raise CliError(f"--n must be at least 1, got {args.n}")
    if args.trials < 1:
        raise CliError(f"--trials must be positive, got {args.trials}")
    ks = _parse_k_list(args.k_list)
    if args.burst_length is not None:
        if args.burst_length < 1:
            raise CliError(f"--burst-length must be positive, got {args.burst_length}")
        model = ErrorModel.burst(args.burst_length)
    else:
        if args.errors < 0:
            raise CliError(f"--errors must be nonnegative, got {args.errors}")
        model = ErrorModel.exact_substitutions(args.errors)
    src = _parse_source(args.source, m)
    try:
        report = run_detection_experiment(src, args.n, ks, model, args.trials, args.seed)
    except ValueError as e:
        raise CliError(str(e)) from None
    if args.format == "json":
        _emit_json(args.out, report.to_dict())
    else:
        lines = ["k,trials,detected,rate,ci_low,ci_high"]
        for row in report.rows:
            lines.append(
                f"{row.shaping_order},{row.trials},{row.detected},"
                f"{_fmt(row.rate)},{_fmt(row.ci_low)},{_fmt(row.ci_high)}"
            )
        _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_encode(args) -> int:
    m = _alphabet_size(args)
    lines = [line for line in _read_lines(args.infile) if line.strip()]
    if len(lines) != 1:
        raise CliError(f"encode expects exactly one string in {args.infile}, found {len(lines)}")
    s = _parse_line(lines[0], 1, m)
    bits = encode_symbols(s.symbols, CodecModelConfig(m))
    Path(args.out).write_bytes(pack_frame(bits, s.n, m))
    return 0


def cmd_decode(args) -> int:
    try:
        raw = Path(args.infile).read_bytes()
    except OSError as e:
        raise CliError(f"cannot read {args.infile}: {e}") from None
    cfg = None
    if args.alphabet is not None:
        cfg = CodecModelConfig(_alphabet_size(args))
    try:
        s = decode_frame(raw, cfg)
    except MalformedBitstream as e:
        raise CliError(str(e)) from None
    _emit(args.out, s.to_text() + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setshaping",
        description="String shaping toolkit: analysis, transforms, and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="mean shaped information content per shaping order")
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    for name, help_text in (("shape", "lengthen strings"), ("unshape", "invert shaping")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--alphabet", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--out")
        p.set_defaults(func=cmd_shape if name == "shape" else cmd_unshape)

    p = sub.add_parser("codec-bench", help="raw-vs-shaped adaptive coding benchmark")
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", help="comma-separated symbol probabilities (default uniform)")
    p.add_argument("--alpha", type=float, default=1.0, help="model smoothing constant")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_codec_bench)

    p = sub.add_parser("testability", help="error-detection rate per shaping order")
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-list", required=True, help="comma-separated shaping orders")
    p.add_argument("--errors", type=int, default=1, help="exact substitutions per message")
    p.add_argument("--burst-length", type=int, help="use a burst error model instead")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", help="comma-separated symbol probabilities (default uniform)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_testability)

    p = sub.add_parser("encode", help="arithmetic-code one string to a frame file")
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a frame file back to a string")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--alphabet", type=int, help="expected alphabet size (checked)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CapacityExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
