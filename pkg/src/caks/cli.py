"""Command-line interface: stream testing, calibration, simulation, benchmark.

Exit codes for ``test``: 0 completed and failed to reject, 1 completed
and rejected, 2 usage or data error. The other subcommands use 0 for
success and 2 for errors. All randomized subcommands require an explicit
seed; nothing is ever seeded from the clock.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .calib import (
    calibrate,
    calibration_csv,
    lookup,
    read_calibration_file,
    write_calibration_file,
)
from .decide import TEST_REPORT_CSV_HEADER
from .nulls import parse_null
from .sim import (
    BENCHMARK_CSV_HEADER,
    SCENARIO_CSV_HEADER,
    ScenarioSpec,
    benchmark,
    run_scenario,
)
from .stream import CaksState

__all__ = ["main", "entry"]

_TEXT_BLOCK_VALUES = 1 << 16
_BINARY_BLOCK_BYTES = 8 * (1 << 16)


class DataError(Exception):
    """Input that cannot be turned into observations."""


def _open_input(path: str, binary: bool):
    if path == "-":
        return (sys.stdin.buffer if binary else sys.stdin), False
    return open(path, "rb" if binary else "r"), True


def _iter_text_blocks(f, skip_invalid: bool):
    """Yield (values_array, n_skipped_lines) in bounded-size blocks."""
    block: list[float] = []
    skipped = 0
    for lineno, raw in enumerate(f, start=1):
        s = raw.strip()
        if not s:
            if skip_invalid:
                skipped += 1
                continue
            raise DataError(f"line {lineno}: empty line")
        try:
            block.append(float(s))
        except ValueError:
            if skip_invalid:
                skipped += 1
                continue
            raise DataError(f"line {lineno}: cannot parse {s!r} as a number") from None
        if len(block) >= _TEXT_BLOCK_VALUES:
            yield np.asarray(block, dtype=np.float64), skipped
            block = []
            skipped = 0
    yield np.asarray(block, dtype=np.float64), skipped


def _iter_binary_blocks(f):
    """Yield float64 arrays from consecutive little-endian 8-byte words."""
    pending = b""
    while True:
        data = f.read(_BINARY_BLOCK_BYTES)
        if not data:
            break
        data = pending + data
        usable = len(data) - (len(data) % 8)
        pending = data[usable:]
        if usable:
            yield np.frombuffer(data[:usable], dtype="<f8")
    if pending:
        raise DataError("binary input length is not a multiple of 8 bytes")


def _resolve_calibration(args, chunk_size: int):
    if args.calibration is not None:
        rows = read_calibration_file(args.calibration)
        for cal in rows:
            if cal.J == chunk_size:
                return cal
        raise DataError(
            f"no calibration for J={chunk_size} in {args.calibration}"
        )
    if args.auto_calibrate is not None:
        reps, seed = args.auto_calibrate
        return calibrate(chunk_size, reps, seed)
    return lookup(chunk_size)


def _parse_auto_calibrate(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected REPLICATES,SEED")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError("expected REPLICATES,SEED") from None


def cmd_test(args) -> int:
    null = parse_null(args.null)
    cal = _resolve_calibration(args, args.chunk_size)
    state = CaksState(
        args.chunk_size,
        null,
        on_invalid="skip" if args.skip_invalid else "error",
    )
    f, close = _open_input(args.input, binary=(args.format == "binary"))
    skipped_lines = 0
    try:
        if args.format == "binary":
            for block in _iter_binary_blocks(f):
                state.push(block)
        else:
            for block, skipped in _iter_text_blocks(f, args.skip_invalid):
                skipped_lines += skipped
                if block.size:
                    state.push(block)
    finally:
        if close:
            f.close()
    report = state.report(cal, args.alpha)
    if skipped_lines:
        report = report.with_warnings(f"skipped {skipped_lines} unparseable lines")
    if args.output == "json":
        print(report.to_json())
    elif args.output == "csv":
        print(TEST_REPORT_CSV_HEADER)
        print(report.to_csv())
    else:
        print(report.to_text())
    return 1 if report.reject else 0


def cmd_calibrate(args) -> int:
    cal = calibrate(args.chunk_size, args.replicates, args.seed)
    write_calibration_file(args.out, [cal])
    return 0


def cmd_simulate(args) -> int:
    spec = ScenarioSpec(
        scenario=args.scenario,
        effect=args.effect,
        T=args.T,
        J=args.J,
        replicates=args.reps,
        alpha=args.alpha,
        master_seed=args.seed,
        direction=args.direction,
    )
    kwargs = {}
    if args.calibration is not None:
        rows = read_calibration_file(args.calibration)
        for cal in rows:
            if cal.J == spec.J:
                kwargs["calibration"] = cal
                break
        else:
            raise DataError(f"no calibration for J={spec.J} in {args.calibration}")
    elif args.auto_calibrate is not None:
        kwargs["cal_replicates"], kwargs["cal_seed"] = args.auto_calibrate
    result = run_scenario(spec, **kwargs)
    if args.output == "json":
        import json

        print(
            json.dumps(
                {
                    "scenario": spec.scenario,
                    "effect": spec.effect,
                    "T": spec.T,
                    "J": spec.J,
                    "replicates": spec.replicates,
                    "alpha": spec.alpha,
                    "rejections": result.rejections,
                    "avg_time_s": result.avg_time_seconds,
                    "seed": spec.master_seed,
                }
            )
        )
    else:
        print(SCENARIO_CSV_HEADER)
        print(result.to_csv())
    return 0


def cmd_bench(args) -> int:
    null = parse_null(args.null)
    result = benchmark(args.n, args.chunk_size, null, args.seed)
    if args.output == "json":
        import json

        print(
            json.dumps(
                {
                    "n": result.n,
                    "J": result.J,
                    "caks_s": result.caks_seconds,
                    "batch_stat_s": result.batch_stat_seconds,
                    "batch_pvalue_s": result.batch_pvalue_seconds,
                }
            )
        )
    else:
        print(BENCHMARK_CSV_HEADER)
        print(result.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caks",
        description="Fixed-memory streaming goodness-of-fit testing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the streaming test on a data file or stdin")
    p_test.add_argument("input", nargs="?", default="-", help="input path, or - for stdin")
    p_test.add_argument("--null", required=True,
                        help="null model: uniform | normal:<mean>,<sd> | t:<df>")
    p_test.add_argument("--chunk-size", type=int, required=True, metavar="J")
    p_test.add_argument("--alpha", type=float, default=0.1)
    p_test.add_argument("--calibration", metavar="FILE",
                        help="calibration CSV holding a row for J")
    p_test.add_argument("--auto-calibrate", type=_parse_auto_calibrate,
                        metavar="R,SEED", help="Monte Carlo calibration on the fly")
    p_test.add_argument("--format", choices=("text", "binary"), default="text",
                        help="text: one decimal per line; binary: little-endian float64")
    p_test.add_argument("--skip-invalid", action="store_true",
                        help="drop (and count) unparseable or non-finite values")
    p_test.add_argument("--output", choices=("text", "csv", "json"), default="text")
    p_test.set_defaults(func=cmd_test)

    p_cal = sub.add_parser("calibrate", help="estimate chunk moments by Monte Carlo")
    p_cal.add_argument("--chunk-size", type=int, required=True, metavar="J")
    p_cal.add_argument("--replicates", type=int, required=True)
    p_cal.add_argument("--seed", type=int, required=True)
    p_cal.add_argument("--out", required=True, metavar="FILE")
    p_cal.set_defaults(func=cmd_calibrate)

    p_sim = sub.add_parser("simulate", help="run one scenario cell of the study grid")
    p_sim.add_argument("--scenario", required=True, choices=("s1", "s2", "s3"),
                       type=str.lower)
    p_sim.add_argument("--effect", type=float, required=True,
                       help="mean for s1, sd for s2, degrees of freedom for s3")
    p_sim.add_argument("--T", type=int, required=True, help="chunks per replicate")
    p_sim.add_argument("--J", type=int, required=True, help="chunk size")
    p_sim.add_argument("--reps", type=int, required=True)
    p_sim.add_argument("--alpha", type=float, default=0.1)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--direction", choices=("forward", "reversed"),
                       default="forward", help="s3 only: which side gets the t distribution")
    p_sim.add_argument("--calibration", metavar="FILE")
    p_sim.add_argument("--auto-calibrate", type=_parse_auto_calibrate, metavar="R,SEED")
    p_sim.add_argument("--output", choices=("csv", "json"), default="csv")
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("bench", help="time the streaming pass against the batch test")
    p_bench.add_argument("--n", type=int, required=True)
    p_bench.add_argument("--chunk-size", type=int, required=True, metavar="J")
    p_bench.add_argument("--null", default="uniform")
    p_bench.add_argument("--seed", type=int, required=True)
    p_bench.add_argument("--output", choices=("csv", "json"), default="csv")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
