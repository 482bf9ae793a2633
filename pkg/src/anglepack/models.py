"""Builds constraint models from packing instances and solves them.

Four model families: fixed or rotation+mirror orientation handling,
each optionally strengthened by redundant rectangular-cumulative and/or
trapezoidal-cumulative relaxations per axis.  The objective is always
end_x + end_y, the half-perimeter of the enclosing box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import engine
from .constraints import (
    CumTask,
    LinkRow,
    LinkTargets,
    OrientationLink,
    ProductAtLeast,
    RectView,
    TrapPart,
    TrapTask,
    post_cumulative,
    post_diffn,
    post_orientation_link,
    post_trapezoid_cumulative,
)
from .engine import IntVar, Model, SearchStats
from .geometry import (
    MODES,
    AnglePiece,
    Layout,
    OrientedPiece,
    Placement,
    orientations,
    piece_area,
    profiles,
    validate_layout,
)

RELAXATIONS = ("none", "cumulative", "trapeze", "both")
CAPACITY_BINDINGS = ("free", "tied")
STRATEGIES = ("default", "paper")

STATUS_OPTIMAL = "Optimal"
STATUS_FEASIBLE = "Feasible"
STATUS_INFEASIBLE = "Infeasible"
STATUS_TIMEOUT = "Timeout"


@dataclass(frozen=True)
class Instance:
    """A packing problem: pieces, box caps, and orientation mode."""

    pieces: tuple[AnglePiece, ...]
    max_end_x: int
    max_end_y: int
    mode: str

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ValueError("instance needs at least one piece")
        if self.max_end_x < 1 or self.max_end_y < 1:
            raise ValueError("instance caps must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        ids = [p.id for p in self.pieces]
        if len(set(ids)) != len(ids):
            raise ValueError("piece ids must be unique")


@dataclass(frozen=True)
class ModelConfig:
    relaxation: str = "both"
    optimize: bool = True
    capacity_binding: str = "tied"
    time_limit: Optional[float] = None
    strategy: str = "default"

    def __post_init__(self) -> None:
        if self.relaxation not in RELAXATIONS:
            raise ValueError(f"unknown relaxation {self.relaxation!r}")
        if self.capacity_binding not in CAPACITY_BINDINGS:
            raise ValueError(f"unknown capacity binding {self.capacity_binding!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass
class PlacementVars:
    """All decision variables of one piece, tied together by one
    orientation link."""

    piece: AnglePiece
    x: IntVar
    y: IntVar
    orient: IntVar
    width: IntVar
    height: IntVar
    end_x: IntVar
    end_y: IntVar
    rect_xs: tuple[IntVar, ...]
    rect_ys: tuple[IntVar, ...]
    rect_ws: tuple[IntVar, ...]
    rect_hs: tuple[IntVar, ...]
    x_durs: tuple[IntVar, ...]
    x_heights: tuple[IntVar, ...]
    y_durs: tuple[IntVar, ...]
    y_heights: tuple[IntVar, ...]
    rows: dict[int, LinkRow]


@dataclass
class BuiltModel:
    instance: Instance
    config: ModelConfig
    model: Optional[Model]
    piece_vars: list[PlacementVars] = field(default_factory=list)
    end_x: Optional[IntVar] = None
    end_y: Optional[IntVar] = None
    cap_x: Optional[IntVar] = None
    cap_y: Optional[IntVar] = None
    infeasible: bool = False


@dataclass
class Outcome:
    status: str
    layout: Optional[Layout]
    objective: Optional[int]
    stats: SearchStats


def _link_row(op: OrientedPiece) -> LinkRow:
    xp, yp = profiles(op)
    return LinkRow(
        orient=op.orient,
        w=op.w,
        h=op.h,
        rects=op.rects,
        x_parts=tuple((p.dur, p.start_h) for p in xp.parts),
        y_parts=tuple((p.dur, p.start_h) for p in yp.parts),
    )


def _enum_var(model: Model, values: set[int], name: str) -> IntVar:
    var = model.add_var(min(values), max(values), name)
    for v in range(min(values), max(values) + 1):
        if v not in values:
            var.remove_value(v)
    return var


def build_model(instance: Instance, config: ModelConfig) -> BuiltModel:
    """Assemble the constraint network for an instance.

    A piece with no orientation that fits within the caps makes the
    whole model infeasible up front (empty orientation domain).
    """
    mx, my = instance.max_end_x, instance.max_end_y
    piece_rows: list[dict[int, LinkRow]] = []
    for piece in instance.pieces:
        rows = {
            op.orient: _link_row(op)
            for op in orientations(piece, instance.mode)
            if op.w <= mx and op.h <= my
        }
        if not rows:
            return BuiltModel(instance, config, model=None, infeasible=True)
        piece_rows.append(rows)

    model = Model()
    end_x = model.add_var(1, mx, "EndX")
    end_y = model.add_var(1, my, "EndY")

    use_cum = config.relaxation in ("cumulative", "both")
    use_trap = config.relaxation in ("trapeze", "both")
    cap_x = cap_y = None
    if use_cum or use_trap:
        if config.capacity_binding == "tied":
            cap_x, cap_y = end_y, end_x
        else:
            cap_x = model.add_var(1, my, "CapX")
            cap_y = model.add_var(1, mx, "CapY")

    piece_vars: list[PlacementVars] = []
    for piece, rows in zip(instance.pieces, piece_rows):
        n = piece.id
        nrects = len(next(iter(rows.values())).rects)
        nparts = len(next(iter(rows.values())).x_parts)
        px = model.add_var(0, mx - 1, f"x{n}")
        py = model.add_var(0, my - 1, f"y{n}")
        orient = _enum_var(model, set(rows), f"o{n}")
        width = _enum_var(model, {r.w for r in rows.values()}, f"w{n}")
        height = _enum_var(model, {r.h for r in rows.values()}, f"h{n}")
        enx = model.add_var(1, mx, f"ex{n}")
        eny = model.add_var(1, my, f"ey{n}")
        rect_xs = tuple(model.add_var(0, mx - 1, f"rx{n}.{i}") for i in range(nrects))
        rect_ys = tuple(model.add_var(0, my - 1, f"ry{n}.{i}") for i in range(nrects))
        rect_ws = tuple(
            _enum_var(model, {r.rects[i].w for r in rows.values()}, f"rw{n}.{i}")
            for i in range(nrects))
        rect_hs = tuple(
            _enum_var(model, {r.rects[i].h for r in rows.values()}, f"rh{n}.{i}")
            for i in range(nrects))
        x_durs = tuple(
            _enum_var(model, {r.x_parts[k][0] for r in rows.values()}, f"xd{n}.{k}")
            for k in range(nparts))
        x_heights = tuple(
            _enum_var(model, {r.x_parts[k][1] for r in rows.values()}, f"xh{n}.{k}")
            for k in range(nparts))
        y_durs = tuple(
            _enum_var(model, {r.y_parts[k][0] for r in rows.values()}, f"yd{n}.{k}")
            for k in range(nparts))
        y_heights = tuple(
            _enum_var(model, {r.y_parts[k][1] for r in rows.values()}, f"yh{n}.{k}")
            for k in range(nparts))
        pv = PlacementVars(piece, px, py, orient, width, height, enx, eny,
                           rect_xs, rect_ys, rect_ws, rect_hs,
                           x_durs, x_heights, y_durs, y_heights, rows)
        piece_vars.append(pv)
        targets = LinkTargets(width, height, enx, eny,
                              rect_xs, rect_ys, rect_ws, rect_hs,
                              x_durs, x_heights, y_durs, y_heights)
        post_orientation_link(model, OrientationLink(orient, px, py, rows, targets))

    all_rects = [
        RectView(pv.rect_xs[i], pv.rect_ys[i], pv.rect_ws[i], pv.rect_hs[i])
        for pv in piece_vars for i in range(len(pv.rect_xs))
    ]
    post_diffn(model, all_rects, extents=(end_x, end_y))
    # Redundant box-capacity bound; unlike the diffn area bound it stays
    # tight while orientations (and hence sub-rectangle dims) are open.
    total_area = sum(piece_area(p) for p in instance.pieces)
    model.post(ProductAtLeast(end_x, end_y, total_area))

    if use_cum:
        post_cumulative(
            model,
            [CumTask(pv.rect_xs[i], pv.rect_ws[i], pv.rect_hs[i])
             for pv in piece_vars for i in range(len(pv.rect_xs))],
            cap_x, end_x)
        post_cumulative(
            model,
            [CumTask(pv.rect_ys[i], pv.rect_hs[i], pv.rect_ws[i])
             for pv in piece_vars for i in range(len(pv.rect_ys))],
            cap_y, end_y)
    if use_trap:
        post_trapezoid_cumulative(
            model,
            [TrapTask(pv.x, tuple(TrapPart(d, h, h) for d, h in zip(pv.x_durs, pv.x_heights)))
             for pv in piece_vars],
            cap_x, end_x)
        post_trapezoid_cumulative(
            model,
            [TrapTask(pv.y, tuple(TrapPart(d, h, h) for d, h in zip(pv.y_durs, pv.y_heights)))
             for pv in piece_vars],
            cap_y, end_y)

    model.objective = (end_x, end_y)
    return BuiltModel(instance, config, model, piece_vars, end_x, end_y, cap_x, cap_y)


def variable_order(built: BuiltModel, strategy: str) -> list[IntVar]:
    """Decision variable order for labeling.

    `default` commits each piece fully before the next: orientation,
    then x, then y.  `paper` labels all x origins, then all y origins,
    then the orientations.  Box extents always come last, so the first
    leaf under a placement uses the tightest box.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    order: list[IntVar] = []
    if strategy == "default":
        for pv in built.piece_vars:
            order.extend((pv.orient, pv.x, pv.y))
    else:
        order.extend(pv.x for pv in built.piece_vars)
        order.extend(pv.y for pv in built.piece_vars)
        order.extend(pv.orient for pv in built.piece_vars)
    order.extend((built.end_x, built.end_y))
    return order


def _extract_layout(built: BuiltModel, solution: dict[IntVar, int]) -> Layout:
    placements = tuple(
        Placement(pv.piece.id, solution[pv.orient], solution[pv.x], solution[pv.y])
        for pv in built.piece_vars
    )
    return Layout(placements, solution[built.end_x], solution[built.end_y])


def solve(instance: Instance, config: ModelConfig) -> Outcome:
    """Build and run one model; always returns a validated outcome.

    With optimize the status is Optimal (exhausted search, best
    incumbent), Infeasible, or Timeout carrying the best incumbent found
    so far.  Without optimize the first solution is returned as
    Feasible.  Identical inputs give identical outcomes and statistics.
    """
    built = build_model(instance, config)
    if built.infeasible:
        return Outcome(STATUS_INFEASIBLE, None, None, SearchStats())
    model = built.model
    order = variable_order(built, config.strategy)
    if config.optimize:
        solution = engine.minimize(model, (built.end_x, built.end_y), order,
                                   time_limit=config.time_limit)
    else:
        solution = engine.label(model, order, time_limit=config.time_limit)
    stats = model.stats

    if solution is None:
        status = STATUS_TIMEOUT if stats.timed_out else STATUS_INFEASIBLE
        return Outcome(status, None, None, stats)
    if stats.timed_out:
        status = STATUS_TIMEOUT
    else:
        status = STATUS_OPTIMAL if config.optimize else STATUS_FEASIBLE
    layout = _extract_layout(built, solution)
    report = validate_layout(instance, layout)
    if not report.ok:
        raise AssertionError(f"solver produced an invalid layout: {report.violations}")
    return Outcome(status, layout, layout.end_x + layout.end_y, stats)
