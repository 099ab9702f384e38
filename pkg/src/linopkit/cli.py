"""Command-line interface.

Subcommands:

* ``bench``           -- run one scenario over a size sweep, write a CSV and
                         a PNG scaling figure next to it
* ``list-scenarios``  -- print the registered scenario names
* ``verify``          -- run the oracle/adjoint property suite

Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.
"""

import argparse
import sys
from pathlib import Path

from .bench import (
    SCENARIOS,
    CrossValidationError,
    Scenario,
    emit_csv,
    run_scenario,
    validate_scenario,
)
from .core import DEFAULT_DENSE_CAP_BYTES
from .verify import run_verification


def _parse_sizes(text):
    try:
        sizes = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--sizes must be comma-separated integers, got {text!r}"
        ) from None
    if not sizes:
        raise argparse.ArgumentTypeError("--sizes must not be empty")
    return sizes


def build_parser():
    parser = argparse.ArgumentParser(
        prog="linopkit",
        description="Structured linear operators: benchmarks and self-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser(
        "bench", help="time a scenario against the dense baseline"
    )
    bench.add_argument(
        "--scenario", required=True, choices=sorted(SCENARIOS),
        help="scenario name (see list-scenarios)",
    )
    bench.add_argument(
        "--sizes", required=True, type=_parse_sizes,
        help="comma-separated ascending problem sizes",
    )
    bench.add_argument("--reps", type=int, default=3,
                       help="timed repetitions per size (min 3)")
    bench.add_argument("--seed", type=int, default=0,
                       help="seed for all scenario randomness")
    bench.add_argument("--out", required=True, help="CSV destination path")
    bench.add_argument(
        "--mem-cap-bytes", type=int, default=DEFAULT_DENSE_CAP_BYTES,
        help="skip the dense baseline above this materialization size",
    )
    bench.add_argument(
        "--no-plot", action="store_true",
        help="skip rendering the PNG scaling figure next to the CSV",
    )

    sub.add_parser("list-scenarios", help="print available scenario names")

    verify = sub.add_parser(
        "verify", help="run the oracle/adjoint property suite"
    )
    verify.add_argument("--max-size", type=int, default=64,
                        help="largest operator dimension to check")
    verify.add_argument("--seed", type=int, default=0)
    return parser


def _run_bench(args):
    problem = validate_scenario(args.scenario, args.sizes)
    if problem:
        print(f"linopkit bench: error: {problem}", file=sys.stderr)
        return 2
    try:
        scenario = Scenario(
            name=args.scenario,
            sizes=tuple(sorted(args.sizes)),
            repetitions=args.reps,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"linopkit bench: error: {exc}", file=sys.stderr)
        return 2
    try:
        records = run_scenario(scenario, mem_cap_bytes=args.mem_cap_bytes)
        emit_csv(records, args.out)
    except (CrossValidationError, OSError) as exc:
        print(f"linopkit bench: {exc}", file=sys.stderr)
        return 1
    for record in records:
        dense = (
            f"dense_min={record.dense_min_s:.3e}s"
            if record.dense_min_s is not None
            else "dense skipped"
        )
        print(
            f"{record.scenario} n={record.size}: "
            f"structured_min={record.structured_min_s:.3e}s {dense} "
            f"mem {record.structured_mem_bytes}B vs {record.dense_mem_bytes}B"
        )
    if not args.no_plot:
        from .plots import render_scaling_figure

        figure_path = Path(args.out).with_suffix(".png")
        render_scaling_figure(records, figure_path)
        print(f"figure written to {figure_path}")
    return 0


def _run_verify(args):
    if args.max_size < 1:
        print("linopkit verify: error: --max-size must be >= 1",
              file=sys.stderr)
        return 2
    results = run_verification(max_size=args.max_size, seed=args.seed)
    failures = [r for r in results if not r.passed]
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    return 1 if failures else 0


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command == "bench":
        return _run_bench(args)
    if args.command == "list-scenarios":
        for name in sorted(SCENARIOS):
            print(name)
        return 0
    return _run_verify(args)


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
