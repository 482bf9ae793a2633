"""JSON file formats for instances and layouts.

Both formats are strict: integers only, required keys present, unknown
keys rejected.  Layout files carry the absolute sub-rectangles of every
placement so that rendering needs no access to the instance, and they
round-trip losslessly through parse/write.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..geometry import AnglePiece, Layout, Placement, Rect, orientation_map
from ..models import Instance, Outcome

INSTANCE_KEYS = {"pieces", "max_end_x", "max_end_y", "mode"}
LAYOUT_KEYS = {"status", "objective", "end_x", "end_y", "placements", "stats"}
PLACEMENT_KEYS = {"piece", "orientation", "x", "y", "rects"}
RECT_KEYS = {"x", "y", "w", "h"}
STATS_KEYS = {"nodes", "fails", "ms"}


class FormatError(ValueError):
    """A file does not match the expected schema."""


def _require_keys(obj: dict, keys: set[str], what: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{what}: expected a JSON object")
    missing = keys - obj.keys()
    if missing:
        raise FormatError(f"{what}: missing keys {sorted(missing)}")
    unknown = obj.keys() - keys
    if unknown:
        raise FormatError(f"{what}: unknown keys {sorted(unknown)}")


def _int(obj, what: str) -> int:
    if not isinstance(obj, int) or isinstance(obj, bool):
        raise FormatError(f"{what}: expected an integer, got {obj!r}")
    return obj


# -- instances ----------------------------------------------------------


def parse_instance(obj) -> Instance:
    _require_keys(obj, INSTANCE_KEYS, "instance")
    raw = obj["pieces"]
    if not isinstance(raw, list) or not raw:
        raise FormatError("instance: 'pieces' must be a non-empty array")
    pieces = []
    for i, sides in enumerate(raw, start=1):
        if not isinstance(sides, list) or len(sides) != 4:
            raise FormatError(f"instance: piece {i} must be an array of four integers")
        a, b, c, d = (_int(v, f"piece {i}") for v in sides)
        try:
            pieces.append(AnglePiece(i, a, b, c, d))
        except ValueError as exc:
            raise FormatError(f"instance: {exc}") from exc
    mode = obj["mode"]
    try:
        return Instance(
            tuple(pieces),
            _int(obj["max_end_x"], "max_end_x"),
            _int(obj["max_end_y"], "max_end_y"),
            mode,
        )
    except ValueError as exc:
        raise FormatError(f"instance: {exc}") from exc


def instance_to_obj(instance: Instance) -> dict:
    return {
        "pieces": [list(p.sides) for p in instance.pieces],
        "max_end_x": instance.max_end_x,
        "max_end_y": instance.max_end_y,
        "mode": instance.mode,
    }


def load_instance(path) -> Instance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return parse_instance(obj)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_obj(instance), indent=2) + "\n")


# -- layouts ------------------------------------------------------------


@dataclass(frozen=True)
class PlacedPiece:
    piece: int
    orientation: int
    x: int
    y: int
    rects: tuple[Rect, ...]


@dataclass(frozen=True)
class LayoutDoc:
    """The exact content of a layout file."""

    status: str
    objective: Optional[int]
    end_x: Optional[int]
    end_y: Optional[int]
    placements: tuple[PlacedPiece, ...]
    nodes: int
    fails: int
    ms: int

    def to_layout(self) -> Layout:
        if self.end_x is None or self.end_y is None:
            raise FormatError("layout file carries no layout (status without incumbent)")
        return Layout(
            tuple(Placement(p.piece, p.orientation, p.x, p.y) for p in self.placements),
            self.end_x,
            self.end_y,
        )


def doc_from_outcome(instance: Instance, outcome: Outcome) -> LayoutDoc:
    placements: tuple[PlacedPiece, ...] = ()
    if outcome.layout is not None:
        by_id = {p.id: p for p in instance.pieces}
        placed = []
        for pl in outcome.layout.placements:
            op = orientation_map(by_id[pl.piece_id])[pl.orient]
            rects = tuple(Rect(pl.x + r.x, pl.y + r.y, r.w, r.h) for r in op.rects)
            placed.append(PlacedPiece(pl.piece_id, pl.orient, pl.x, pl.y, rects))
        placements = tuple(placed)
    return LayoutDoc(
        status=outcome.status,
        objective=outcome.objective,
        end_x=outcome.layout.end_x if outcome.layout else None,
        end_y=outcome.layout.end_y if outcome.layout else None,
        placements=placements,
        nodes=outcome.stats.nodes,
        fails=outcome.stats.fails,
        ms=int(outcome.stats.elapsed * 1000),
    )


def layout_to_obj(doc: LayoutDoc) -> dict:
    return {
        "status": doc.status,
        "objective": doc.objective,
        "end_x": doc.end_x,
        "end_y": doc.end_y,
        "placements": [
            {
                "piece": p.piece,
                "orientation": p.orientation,
                "x": p.x,
                "y": p.y,
                "rects": [{"x": r.x, "y": r.y, "w": r.w, "h": r.h} for r in p.rects],
            }
            for p in doc.placements
        ],
        "stats": {"nodes": doc.nodes, "fails": doc.fails, "ms": doc.ms},
    }


def parse_layout(obj) -> LayoutDoc:
    _require_keys(obj, LAYOUT_KEYS, "layout")
    status = obj["status"]
    if status not in ("Optimal", "Feasible", "Infeasible", "Timeout"):
        raise FormatError(f"layout: unknown status {status!r}")
    objective = obj["objective"]
    if objective is not None:
        objective = _int(objective, "objective")
    end_x, end_y = obj["end_x"], obj["end_y"]
    if (end_x is None) != (end_y is None):
        raise FormatError("layout: end_x and end_y must both be set or both null")
    if end_x is not None:
        end_x = _int(end_x, "end_x")
        end_y = _int(end_y, "end_y")
    placements = []
    if not isinstance(obj["placements"], list):
        raise FormatError("layout: 'placements' must be an array")
    for entry in obj["placements"]:
        _require_keys(entry, PLACEMENT_KEYS, "placement")
        if not isinstance(entry["rects"], list):
            raise FormatError("placement: 'rects' must be an array")
        rects = []
        for r in entry["rects"]:
            _require_keys(r, RECT_KEYS, "rect")
            rects.append(Rect(*(_int(r[k], f"rect.{k}") for k in ("x", "y", "w", "h"))))
        placements.append(PlacedPiece(
            _int(entry["piece"], "piece"),
            _int(entry["orientation"], "orientation"),
            _int(entry["x"], "x"),
            _int(entry["y"], "y"),
            tuple(rects),
        ))
    stats = obj["stats"]
    _require_keys(stats, STATS_KEYS, "stats")
    return LayoutDoc(
        status=status,
        objective=objective,
        end_x=end_x,
        end_y=end_y,
        placements=tuple(placements),
        nodes=_int(stats["nodes"], "nodes"),
        fails=_int(stats["fails"], "fails"),
        ms=_int(stats["ms"], "ms"),
    )


def load_layout(path) -> LayoutDoc:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return parse_layout(obj)


def save_layout(doc: LayoutDoc, path) -> None:
    Path(path).write_text(json.dumps(layout_to_obj(doc), indent=2) + "\n")
