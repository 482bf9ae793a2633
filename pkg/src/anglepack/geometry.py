"""Geometry of L-shaped pieces: classification, decomposition into two
rectangles, orientation enumeration, axis step profiles, cell
rasterization, and layout validation.

A piece is described by four positive integers (a, b, c, d).  Unless it
degenerates to a plain rectangle, the piece fills its bounding box except
for a single rectangular notch of size |c-a| x |b-d| cut out of one
corner; which corner is a fixed function of the signs of (c-a) and (b-d).

Coordinates are integer grid units.  The origin of a piece (and of a
layout) is its bottom-left corner, x grows rightward and y grows upward.
All functions here are pure and all values immutable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

MODE_FIXED = "fixed"
MODE_ROT_MIRROR = "rot_mirror"
MODES = (MODE_FIXED, MODE_ROT_MIRROR)


class Pattern(enum.Enum):
    """Corner of the bounding box occupied by the notch (RECT: no notch)."""

    RECT = "rect"
    NOTCH_BL = "notch_bl"
    NOTCH_TR = "notch_tr"
    NOTCH_TL = "notch_tl"
    NOTCH_BR = "notch_br"


class Rect(NamedTuple):
    """Axis-aligned rectangle; (x, y) is its bottom-left corner."""

    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h


class ProfileStep(NamedTuple):
    """One constant-height run of a step profile.

    `start_h` and `end_h` are kept separate so that ramp-shaped steps can
    be represented; every profile produced here has start_h == end_h.
    """

    dur: int
    start_h: int
    end_h: int


@dataclass(frozen=True)
class StepProfile:
    """Consecutive height steps along one axis, laid out from the origin."""

    parts: tuple[ProfileStep, ...]

    @property
    def extent(self) -> int:
        return sum(p.dur for p in self.parts)

    @property
    def material(self) -> int:
        """Total covered area, i.e. the integral of the profile."""
        return sum(p.dur * p.start_h for p in self.parts)


@dataclass(frozen=True)
class AnglePiece:
    """An L-shaped piece, identified by four positive side lengths.

    `id` is the 1-based index of the piece within its instance.
    """

    id: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError(f"piece id must be >= 1, got {self.id}")
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"piece {self.id}: side {name}={v!r} must be a positive integer")

    @property
    def sides(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class OrientedPiece:
    """One concrete orientation of a piece.

    `rects` are one or two sub-rectangles given as offsets from the piece
    origin; together they tile the piece exactly.  `orient` encodes the
    transformation applied to the identity orientation: index 2*r + m
    means "mirror horizontally if m, then rotate r quarter turns
    counterclockwise".
    """

    piece_id: int
    orient: int
    w: int
    h: int
    rects: tuple[Rect, ...]
    notch_w: int
    notch_h: int

    @property
    def area(self) -> int:
        return sum(r.area for r in self.rects)


@dataclass(frozen=True)
class Placement:
    """A piece pinned at a position in a chosen orientation."""

    piece_id: int
    orient: int
    x: int
    y: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0:
            raise ValueError(f"placement of piece {self.piece_id}: origin must be non-negative")


@dataclass(frozen=True)
class Layout:
    """A full placement list plus the enclosing box extents."""

    placements: tuple[Placement, ...]
    end_x: int
    end_y: int

    def __post_init__(self) -> None:
        if self.end_x < 1 or self.end_y < 1:
            raise ValueError("layout extents must be positive")


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validating a layout; empty violation list means valid."""

    violations: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def classify(piece: AnglePiece) -> Pattern:
    """Determine which bounding-box corner holds the notch.

    Degenerate pieces (a == c or b == d) have no notch and are plain
    rectangles.  The corner convention for the remaining sign cases is
    fixed here once and shared by solver and oracle alike.
    """
    a, b, c, d = piece.sides
    if a == c or b == d:
        return Pattern.RECT
    if c > a:
        return Pattern.NOTCH_BL if b > d else Pattern.NOTCH_TR
    return Pattern.NOTCH_TL if b > d else Pattern.NOTCH_BR


def decompose(piece: AnglePiece) -> OrientedPiece:
    """Split a piece into its identity-orientation sub-rectangles.

    Each pattern splits into a rectangle spanning the full side opposite
    the notch plus the remaining block; rectangles are listed in (x, y)
    order of their origins.
    """
    a, b, c, d = piece.sides
    pattern = classify(piece)
    if pattern is Pattern.RECT:
        w, h = max(a, c), max(b, d)
        rects = (Rect(0, 0, w, h),)
    elif pattern is Pattern.NOTCH_BL:
        w, h = c, b
        rects = (Rect(0, b - d, c, d), Rect(c - a, 0, a, b - d))
    elif pattern is Pattern.NOTCH_TR:
        w, h = c, d
        rects = (Rect(0, 0, a, d), Rect(a, 0, c - a, b))
    elif pattern is Pattern.NOTCH_TL:
        w, h = a, b
        rects = (Rect(0, 0, a, d), Rect(a - c, d, c, b - d))
    else:  # NOTCH_BR
        w, h = a, d
        rects = (Rect(0, 0, c, d - b), Rect(0, d - b, a, b))
    return OrientedPiece(
        piece_id=piece.id,
        orient=0,
        w=w,
        h=h,
        rects=rects,
        notch_w=abs(c - a),
        notch_h=abs(b - d),
    )


def piece_area(piece: AnglePiece) -> int:
    return decompose(piece).area


def _rotate_ccw(op: OrientedPiece, orient: int) -> OrientedPiece:
    rects = tuple(sorted(Rect(op.h - r.y - r.h, r.x, r.h, r.w) for r in op.rects))
    return OrientedPiece(op.piece_id, orient, op.h, op.w, rects, op.notch_h, op.notch_w)


def _mirror_x(op: OrientedPiece, orient: int) -> OrientedPiece:
    rects = tuple(sorted(Rect(op.w - r.x - r.w, r.y, r.w, r.h) for r in op.rects))
    return OrientedPiece(op.piece_id, orient, op.w, op.h, rects, op.notch_w, op.notch_h)


def orientations(piece: AnglePiece, mode: str) -> tuple[OrientedPiece, ...]:
    """Enumerate the distinct orientations of a piece for a packing mode.

    `fixed` yields only the identity.  `rot_mirror` applies all four
    quarter turns with and without a horizontal mirror, dropping
    candidates whose cell sets coincide with an earlier one.  Orientation
    indices are 2*rotation + mirror of the first occurrence, so the
    sequence is deterministic and indices are stable.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    identity = decompose(piece)
    if mode == MODE_FIXED:
        return (identity,)
    out: list[OrientedPiece] = []
    seen: set[frozenset[tuple[int, int]]] = set()
    for rot in range(4):
        for mir in range(2):
            op = identity
            if mir:
                op = _mirror_x(op, 0)
            for _ in range(rot):
                op = _rotate_ccw(op, 0)
            op = OrientedPiece(op.piece_id, 2 * rot + mir, op.w, op.h, op.rects,
                               op.notch_w, op.notch_h)
            key = cells(op)
            if key not in seen:
                seen.add(key)
                out.append(op)
    return tuple(out)


def orientation_map(piece: AnglePiece) -> dict[int, OrientedPiece]:
    """All distinct orientations of a piece keyed by orientation index."""
    return {op.orient: op for op in orientations(piece, MODE_ROT_MIRROR)}


def cells(op: OrientedPiece, origin: tuple[int, int] = (0, 0)) -> frozenset[tuple[int, int]]:
    """Rasterize an oriented piece into unit cells at the given origin."""
    ox, oy = origin
    if ox < 0 or oy < 0:
        raise ValueError("cell origin must be non-negative")
    out = set()
    for r in op.rects:
        for col in range(ox + r.x, ox + r.x + r.w):
            for row in range(oy + r.y, oy + r.y + r.h):
                out.add((col, row))
    return frozenset(out)


def _merge_runs(heights: list[int]) -> StepProfile:
    parts: list[ProfileStep] = []
    for h in heights:
        if parts and parts[-1].start_h == h:
            parts[-1] = ProfileStep(parts[-1].dur + 1, h, h)
        else:
            parts.append(ProfileStep(1, h, h))
    return StepProfile(tuple(parts))


def profiles(op: OrientedPiece) -> tuple[StepProfile, StepProfile]:
    """Per-axis occupancy profiles of an oriented piece.

    The x profile gives, column by column from the piece origin, the
    total occupied y-length (and symmetrically for the y profile).  Runs
    of equal height are merged, so an L yields two parts per axis and a
    rectangle one.
    """
    col_heights = [0] * op.w
    row_widths = [0] * op.h
    for r in op.rects:
        for x in range(r.x, r.x + r.w):
            col_heights[x] += r.h
        for y in range(r.y, r.y + r.h):
            row_widths[y] += r.w
    return _merge_runs(col_heights), _merge_runs(row_widths)


def validate_layout(instance, layout: Layout) -> ValidationReport:
    """Check a layout against an instance.

    `instance` needs `pieces` and `mode` attributes (see models.Instance).
    Violations reported: orientation illegal for the instance mode, cells
    outside the end_x x end_y box, and cells shared by two pieces.
    Unknown piece ids, missing/duplicate placements and orientation
    indices that exist for no orientation of the piece are input errors
    and raise ValueError.
    """
    pieces = {p.id: p for p in instance.pieces}
    placed = [pl.piece_id for pl in layout.placements]
    if sorted(placed) != sorted(pieces):
        raise ValueError("layout does not place each instance piece exactly once")

    violations: list[str] = []
    occupied: dict[tuple[int, int], int] = {}
    overlaps_seen: set[tuple[int, int]] = set()
    for pl in layout.placements:
        piece = pieces.get(pl.piece_id)
        if piece is None:
            raise ValueError(f"unknown piece id {pl.piece_id}")
        by_index = orientation_map(piece)
        if pl.orient not in by_index:
            raise ValueError(f"piece {pl.piece_id}: orientation index {pl.orient} out of range")
        legal = {op.orient for op in orientations(piece, instance.mode)}
        if pl.orient not in legal:
            violations.append(
                f"piece {pl.piece_id}: orientation {pl.orient} not allowed in {instance.mode} mode"
            )
        for cell in cells(by_index[pl.orient], (pl.x, pl.y)):
            if cell[0] >= layout.end_x or cell[1] >= layout.end_y:
                violations.append(
                    f"piece {pl.piece_id}: cell {cell} outside box "
                    f"{layout.end_x}x{layout.end_y}"
                )
            other = occupied.get(cell)
            if other is None:
                occupied[cell] = pl.piece_id
            elif cell not in overlaps_seen:
                overlaps_seen.add(cell)
                violations.append(f"cell {cell} shared by pieces {other} and {pl.piece_id}")
    return ValidationReport(tuple(violations))
