"""Benchmark harness: solve size-n prefixes of the shipped piece family
under a grid of configurations and emit CSV rows plus a markdown table.

The piece family is the concatenation of the two shipped example piece
lists; the instance of size n takes its first n pieces.  Timings are
reported for comparison only; no ordering between configurations is
asserted anywhere.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from ..geometry import AnglePiece
from ..models import Instance, ModelConfig, solve

CSV_HEADER = "n,mode,relaxation,optimize,capacity_binding,status,objective,nodes,fails,ms"


@dataclass(frozen=True)
class BenchRow:
    n: int
    mode: str
    relaxation: str
    optimize: bool
    capacity_binding: str
    status: str
    objective: Optional[int]
    nodes: int
    fails: int
    ms: int

    def to_csv(self) -> str:
        objective = "" if self.objective is None else str(self.objective)
        return (f"{self.n},{self.mode},{self.relaxation},{self.optimize},"
                f"{self.capacity_binding},{self.status},{objective},"
                f"{self.nodes},{self.fails},{self.ms}")


def family_pieces() -> list[AnglePiece]:
    raw = json.loads(resources.files("anglepack.data").joinpath("bench_pieces.json").read_text())
    return [AnglePiece(i, *sides) for i, sides in enumerate(raw["pieces"], start=1)]


def family_caps() -> tuple[int, int]:
    raw = json.loads(resources.files("anglepack.data").joinpath("bench_pieces.json").read_text())
    return raw["max_end_x"], raw["max_end_y"]


def _run_one(args) -> BenchRow:
    sides, n, mode, relaxation, optimize, capacity, time_limit = args
    pieces = tuple(AnglePiece(i, *s) for i, s in enumerate(sides[:n], start=1))
    caps = family_caps()
    instance = Instance(pieces, caps[0], caps[1], mode)
    config = ModelConfig(relaxation=relaxation, optimize=optimize,
                         capacity_binding=capacity, time_limit=time_limit)
    outcome = solve(instance, config)
    return BenchRow(
        n=n,
        mode=mode,
        relaxation=relaxation,
        optimize=optimize,
        capacity_binding=capacity,
        status=outcome.status,
        objective=outcome.objective,
        nodes=outcome.stats.nodes,
        fails=outcome.stats.fails,
        ms=int(outcome.stats.elapsed * 1000),
    )


def run_bench(sizes: Sequence[int], mode: str, relaxations: Sequence[str],
              optimize_values: Sequence[bool], capacity: str,
              time_limit: Optional[float], jobs: int = 1) -> list[BenchRow]:
    """One row per (size, relaxation, optimize), in that nesting order.

    Rows come back in deterministic grid order regardless of `jobs`.
    """
    pieces = family_pieces()
    if max(sizes) > len(pieces):
        raise ValueError(f"size {max(sizes)} exceeds the {len(pieces)}-piece family")
    sides = [list(p.sides) for p in pieces]
    grid = [
        (sides, n, mode, relaxation, optimize, capacity, time_limit)
        for n in sizes
        for relaxation in relaxations
        for optimize in optimize_values
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, grid))
    return [_run_one(args) for args in grid]


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.to_csv() for r in rows]) + "\n"


def _fmt_ms(ms: int) -> str:
    seconds, milli = divmod(ms, 1000)
    minutes, sec = divmod(seconds, 60)
    hours, minutes = divmod(minutes, 60)
    return f"{hours:02d}:{minutes:02d}:{sec:02d}.{milli:03d}"


def _cell(row: BenchRow, time_limit: Optional[float]) -> str:
    if row.status == "Timeout" and time_limit is not None:
        return f">{_fmt_ms(int(time_limit * 1000))}"
    mark = "" if row.status in ("Optimal", "Feasible") else f" ({row.status})"
    return f"{_fmt_ms(row.ms)}{mark}"


def rows_to_markdown(rows: Sequence[BenchRow], time_limit: Optional[float]) -> str:
    """A table with one line per size and one column per configuration,
    followed by a note on how to read the timings."""
    combos: list[tuple[str, bool]] = []
    for r in rows:
        key = (r.relaxation, r.optimize)
        if key not in combos:
            combos.append(key)
    sizes = sorted({r.n for r in rows})
    by_key = {(r.n, r.relaxation, r.optimize): r for r in rows}

    def combo_name(relaxation: str, optimize: bool) -> str:
        return f"{relaxation}, {'optimize' if optimize else 'first solution'}"

    lines = ["| n | " + " | ".join(combo_name(*c) for c in combos) + " |",
             "|---" * (len(combos) + 1) + "|"]
    for n in sizes:
        cells = []
        for relaxation, optimize in combos:
            row = by_key.get((n, relaxation, optimize))
            cells.append(_cell(row, time_limit) if row else "-")
        lines.append(f"| {n} | " + " | ".join(cells) + " |")
    lines.append("")
    lines.append(
        "Note: wall-clock timings above are machine- and run-specific and are "
        "reported for side-by-side inspection only; no ordering between "
        "configurations is asserted. Statuses other than a clean solve are "
        "marked in the cell."
    )
    return "\n".join(lines) + "\n"
