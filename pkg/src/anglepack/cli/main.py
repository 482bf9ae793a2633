"""anglepack command line.

Subcommands: solve, validate, oracle, render, bench.  Exit codes follow
one contract everywhere: 0 success (solved / valid), 1 infeasible or
invalid layout, 2 timeout, 3 bad input.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from ..models import ModelConfig, Outcome, solve
from ..oracle import BudgetExceededError, DEFAULT_BUDGET, brute_force_optimal
from ..engine import SearchStats
from ..geometry import validate_layout
from . import bench as bench_mod
from .formats import (
    FormatError,
    LayoutDoc,
    doc_from_outcome,
    load_instance,
    load_layout,
    save_layout,
)
from .render import render_ascii, render_svg

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_TIMEOUT = 2
EXIT_BAD_INPUT = 3


def _status_exit(status: str) -> int:
    if status in ("Optimal", "Feasible"):
        return EXIT_OK
    if status == "Infeasible":
        return EXIT_INFEASIBLE
    return EXIT_TIMEOUT


def _write_outputs(doc: LayoutDoc, out: str | None, svg: str | None) -> None:
    if out:
        save_layout(doc, out)
    else:
        import json

        from .formats import layout_to_obj
        print(json.dumps(layout_to_obj(doc), indent=2))
    if svg:
        Path(svg).write_text(render_svg(doc))


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    config = ModelConfig(
        relaxation=args.relax,
        optimize=args.optimize,
        capacity_binding=args.cap,
        time_limit=args.time_limit_s,
        strategy=args.strategy,
    )
    outcome = solve(instance, config)
    doc = doc_from_outcome(instance, outcome)
    _write_outputs(doc, args.out, args.svg if outcome.layout else None)
    return _status_exit(outcome.status)


def cmd_validate(args) -> int:
    instance = load_instance(args.instance)
    doc = load_layout(args.layout)
    if len(doc.placements) != len(instance.pieces):
        raise FormatError(
            f"layout places {len(doc.placements)} pieces, instance has {len(instance.pieces)}")
    report = validate_layout(instance, doc.to_layout())
    for v in report.violations:
        print(v, file=sys.stderr)
    if report.ok:
        print("layout is valid")
        return EXIT_OK
    return EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    instance = load_instance(args.instance)
    start = time.perf_counter()
    result = brute_force_optimal(instance, budget=args.budget)
    elapsed = time.perf_counter() - start
    if result is None:
        print("instance is infeasible within its caps", file=sys.stderr)
        return EXIT_INFEASIBLE
    stats = SearchStats(nodes=result.attempts, fails=0, solutions=1,
                        best_objective=result.objective, elapsed=elapsed)
    outcome = Outcome("Optimal", result.layout, result.objective, stats)
    doc = doc_from_outcome(instance, outcome)
    _write_outputs(doc, args.out, args.svg if result.layout else None)
    return EXIT_OK


def cmd_render(args) -> int:
    doc = load_layout(args.layout)
    if not args.svg and not args.ascii:
        raise FormatError("render: pass --svg PATH and/or --ascii")
    if args.svg:
        Path(args.svg).write_text(render_svg(doc))
    if args.ascii:
        print(render_ascii(doc), end="")
    return EXIT_OK


def _parse_sizes(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        sizes = list(range(int(lo), int(hi) + 1))
    else:
        sizes = [int(part) for part in spec.split(",")]
    if not sizes or any(s < 1 for s in sizes):
        raise FormatError(f"bad --sizes {spec!r}")
    return sizes


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    optimize_values = {"on": [True], "off": [False], "both": [False, True]}[args.optimize]
    try:
        rows = bench_mod.run_bench(
            sizes=sizes,
            mode=args.mode,
            relaxations=args.relax,
            optimize_values=optimize_values,
            capacity=args.cap,
            time_limit=args.time_limit_s,
            jobs=args.jobs,
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    csv_text = bench_mod.rows_to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(csv_text)
    else:
        print(csv_text, end="")
    if args.md:
        Path(args.md).write_text(bench_mod.rows_to_markdown(rows, args.time_limit_s))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anglepack",
        description="Pack L-shaped pieces into a minimum half-perimeter box.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("--relax", choices=["none", "cumulative", "trapeze", "both"],
                   default="both")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--optimize", dest="optimize", action="store_true", default=True,
                   help="minimize end_x + end_y (default)")
    g.add_argument("--first", dest="optimize", action="store_false",
                   help="stop at the first feasible layout")
    p.add_argument("--cap", choices=["tied", "free"], default="tied",
                   help="capacity binding of the cumulative relaxations")
    p.add_argument("--time-limit-s", type=float, default=None)
    p.add_argument("--strategy", choices=["default", "paper"], default="default")
    p.add_argument("--out", help="write the layout file here (default: stdout)")
    p.add_argument("--svg", help="also render the layout to this SVG path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a layout file against an instance")
    p.add_argument("instance")
    p.add_argument("layout")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="exhaustive exact optimum (independent of the solver)")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="max placement attempts before refusing")
    p.add_argument("--out", help="write the layout file here (default: stdout)")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="render a layout file")
    p.add_argument("layout")
    p.add_argument("--svg", help="write an SVG here")
    p.add_argument("--ascii", action="store_true", help="print an ASCII grid")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="benchmark the model variants on the shipped family")
    p.add_argument("--sizes", default="4..7", help="e.g. 4..10 or 4,6,8")
    p.add_argument("--mode", choices=["fixed", "rot_mirror"], default="rot_mirror")
    p.add_argument("--relax", nargs="+", default=["cumulative", "trapeze"],
                   choices=["none", "cumulative", "trapeze", "both"])
    p.add_argument("--optimize", choices=["on", "off", "both"], default="both")
    p.add_argument("--cap", choices=["tied", "free"], default="tied")
    p.add_argument("--time-limit-s", type=float, default=7200.0,
                   help="per-run limit (default two hours)")
    p.add_argument("--csv", help="write rows here (default: stdout)")
    p.add_argument("--md", help="also write a markdown table here")
    p.add_argument("--jobs", type=int, default=1, help="run rows in parallel")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
