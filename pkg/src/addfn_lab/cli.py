"""Command-line front end.

Exit codes: 0 success, 1 acceptance failure, 2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional, Sequence

from .classify import (
    DEFAULT_GROWTH_TOLERANCE,
    DEFAULT_PROXY_HIGH,
    DEFAULT_PROXY_LOW,
    DEFAULT_TAIL_THRESHOLD,
    classify,
)
from .empirical import empirical_grid, normalized_histogram
from .functions import UnknownFunctionError, parse_function, strong_projection
from .output import render, to_json, write_text
from .sieve import DEFAULT_SEGMENT_SIZE, HARD_CAP, ResourceLimitError
from .sums import REFERENCE_KINDS, geometric_grid, moment_sums, reference_sum

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

ANALYZE_COLUMNS = ["n", "A", "D", "A_star", "D_star", "delta_A", "delta_D", "mean", "variance"]
COMPARE_COLUMNS = ["n", "A_f", "A_g", "D_f", "D_g", "diff_A", "diff_D"]


class UsageError(Exception):
    pass


def natural(text: str) -> int:
    """Positive integer, scientific notation allowed (1e7)."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addfn-lab",
        description="Moments and class tests for additive arithmetic functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=natural, default=10**6)
    common.add_argument("--n-min", type=natural, default=100, help="first grid point")
    common.add_argument("--grid-points", type=int, default=13)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--segment-size", type=natural, default=DEFAULT_SEGMENT_SIZE)
    common.add_argument("--cap", type=natural, default=HARD_CAP, help="hard cap on n")

    p = sub.add_parser("analyze", parents=[common], help="A, D, A*, D* and empirical moments on a grid")
    p.add_argument("--function", required=True)

    p = sub.add_parser("reference", parents=[common], help="Mertens-type reference sums")
    p.add_argument("--kind", choices=REFERENCE_KINDS, action="append")

    p = sub.add_parser("classify", parents=[common], help="class S / class-H proxy / growth report (JSON)")
    p.add_argument("--function", required=True)
    p.add_argument("--tail-threshold", type=float, default=DEFAULT_TAIL_THRESHOLD)
    p.add_argument("--proxy-low", type=float, default=DEFAULT_PROXY_LOW)
    p.add_argument("--proxy-high", type=float, default=DEFAULT_PROXY_HIGH)
    p.add_argument("--growth-tolerance", type=float, default=DEFAULT_GROWTH_TOLERANCE)
    p.add_argument("--no-growth", action="store_true", help="skip the factorization pass")

    p = sub.add_parser("compare", parents=[common], help="A and D of two functions side by side")
    p.add_argument("--function", required=True)
    p.add_argument("--against", default=None, help="default: strong projection of --function")

    p = sub.add_parser("histogram", parents=[common], help="distribution of (f(m) - A)/sqrt(D), m <= n")
    p.add_argument("--function", required=True)
    p.add_argument("--bins", type=int, default=41)
    p.add_argument("--centering", choices=("theoretical", "empirical"), default="theoretical")

    p = sub.add_parser("acceptance", help="run the acceptance experiments")
    p.add_argument("--n-max", type=natural, default=10**7)
    p.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    return parser


def _grid(args) -> List[int]:
    if args.grid_points < 3:
        raise UsageError("--grid-points must be at least 3")
    if args.n_max > args.cap:
        raise ResourceLimitError(f"--n-max {args.n_max} exceeds cap {args.cap}")
    n_min = min(args.n_min, args.n_max)
    if n_min < 2:
        raise UsageError("--n-min must be at least 2")
    return geometric_grid(n_min, args.n_max, args.grid_points)


def _function(text: str):
    try:
        return parse_function(text)
    except (UnknownFunctionError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_analyze(args) -> str:
    spec = _function(args.function)
    grid = _grid(args)
    sums = moment_sums(spec, grid, args.segment_size, args.cap)
    emp = empirical_grid(spec, grid, args.workers, args.segment_size, args.cap)
    rows = sums.rows()
    for row, e in zip(rows, emp):
        row["mean"] = e.mean
        row["variance"] = e.variance
    return render(rows, args.format, ANALYZE_COLUMNS)


def cmd_reference(args) -> str:
    grid = _grid(args)
    rows = []
    for kind in args.kind or REFERENCE_KINDS:
        rows.extend(reference_sum(kind, grid, args.segment_size, args.cap).rows())
    return render(rows, args.format)


def cmd_classify(args) -> str:
    spec = _function(args.function)
    grid = _grid(args)
    report = classify(
        spec, grid,
        tail_threshold=args.tail_threshold,
        proxy_low=args.proxy_low,
        proxy_high=args.proxy_high,
        growth_tolerance=args.growth_tolerance,
        with_growth=not args.no_growth,
        workers=args.workers,
        segment_size=args.segment_size,
        cap=args.cap,
    )
    return to_json(report.to_json())


def cmd_compare(args) -> str:
    f = _function(args.function)
    g = _function(args.against) if args.against else strong_projection(f)
    grid = _grid(args)
    sf = moment_sums(f, grid, args.segment_size, args.cap)
    sg = moment_sums(g, grid, args.segment_size, args.cap)
    rows = [
        {
            "n": n,
            "A_f": float(sf.A[i]), "A_g": float(sg.A[i]),
            "D_f": float(sf.D[i]), "D_g": float(sg.D[i]),
            "diff_A": float(sf.A[i] - sg.A[i]), "diff_D": float(sf.D[i] - sg.D[i]),
        }
        for i, n in enumerate(grid)
    ]
    return render(rows, args.format, COMPARE_COLUMNS)


def cmd_histogram(args) -> str:
    spec = _function(args.function)
    if args.n_max > args.cap:
        raise ResourceLimitError(f"--n-max {args.n_max} exceeds cap {args.cap}")
    if args.bins < 2:
        raise UsageError("--bins must be at least 2")
    try:
        hist = normalized_histogram(
            spec, args.n_max, args.bins, args.centering,
            segment_size=args.segment_size, cap=args.cap,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return render(hist.rows(), args.format)


def cmd_acceptance(args) -> int:
    from .acceptance import run_acceptance

    try:
        results = run_acceptance(args.n_max, args.only, echo=lambda s: print(s, flush=True))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {failed}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "reference": cmd_reference,
    "classify": cmd_classify,
    "compare": cmd_compare,
    "histogram": cmd_histogram,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "acceptance":
            return cmd_acceptance(args)
        text = COMMANDS[args.command](args)
        write_text(text, args.out, sys.stdout)
    except UsageError as exc:
        print(f"addfn-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"addfn-lab: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
