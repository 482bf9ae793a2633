"""Exhaustive optimal packer over explicit cell grids.

Independent of the constraint solver: placements are tested directly on
an occupancy bitboard, so results double as ground truth for the solver
and for derived test values.  Candidate boxes are enumerated by
ascending half-perimeter, which makes the first feasible box optimal for
the end_x + end_y objective.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    MODE_ROT_MIRROR,
    Layout,
    OrientedPiece,
    Placement,
    cells,
    orientations,
    piece_area,
)

DEFAULT_BUDGET = 100_000_000


class BudgetExceededError(RuntimeError):
    """The configured number of placement attempts was exhausted before
    the search finished; distinct from the instance being infeasible."""


@dataclass
class Occupancy:
    """A width x height cell grid with an int bitset of occupied cells;
    bit row * width + col stands for the cell (col, row)."""

    width: int
    height: int
    bits: int = 0

    def piece_mask(self, op: OrientedPiece) -> int:
        mask = 0
        for col, row in cells(op):
            mask |= 1 << (row * self.width + col)
        return mask

    def fits(self, mask: int) -> bool:
        return self.bits & mask == 0

    def place(self, mask: int) -> None:
        self.bits |= mask

    def remove(self, mask: int) -> None:
        self.bits &= ~mask

    @property
    def filled(self) -> int:
        return self.bits.bit_count()


@dataclass
class OracleResult:
    objective: int
    layout: Layout
    attempts: int


def brute_force_optimal(instance, budget: int = DEFAULT_BUDGET):
    """Find a minimum end_x + end_y packing by exhaustive search.

    Boxes (X, Y) within the instance caps are tried in ascending X + Y
    (ties by ascending X); within a box, pieces are placed depth-first in
    input order over their legal orientations and all origins.  Returns
    an OracleResult, or None when no box admits a packing.  Raises
    BudgetExceededError after `budget` placement attempts.
    """
    pieces = list(instance.pieces)
    orients = [orientations(p, instance.mode) for p in pieces]
    areas = [piece_area(p) for p in pieces]
    total_area = sum(areas)
    mirror_mode = instance.mode == MODE_ROT_MIRROR

    boxes = sorted(
        ((x + y, x, y)
         for x in range(1, instance.max_end_x + 1)
         for y in range(1, instance.max_end_y + 1)),
    )

    attempts = 0
    for _, box_x, box_y in boxes:
        if box_x * box_y < total_area:
            continue
        if any(all(op.w > box_x or op.h > box_y for op in ops) for ops in orients):
            continue
        grid = Occupancy(box_x, box_y)
        masks = [
            [(op, grid.piece_mask(op)) for op in ops if op.w <= box_x and op.h <= box_y]
            for ops in orients
        ]
        perfect = total_area == box_x * box_y
        full = (1 << (box_x * box_y)) - 1
        chosen: list[Placement] = []

        def covers_lowest_hole(k: int) -> bool:
            """In a perfect packing every cell must be covered; check the
            lowest free cell still can be, by any remaining piece."""
            free = full & ~grid.bits
            if free == 0:
                return True
            low = free & -free
            pos = low.bit_length() - 1
            trow, tcol = divmod(pos, box_x)
            for p in range(k, len(pieces)):
                for op, base in masks[p]:
                    for ccol, crow in cells(op):
                        dx, dy = tcol - ccol, trow - crow
                        if dx < 0 or dy < 0 or dx + op.w > box_x or dy + op.h > box_y:
                            continue
                        if grid.fits(base << (dy * box_x + dx)):
                            return True
            return False

        def place_from(k: int) -> bool:
            nonlocal attempts
            if k == len(pieces):
                return True
            if perfect and not covers_lowest_hole(k):
                return False
            for op, base in masks[k]:
                x_hi = box_x - op.w
                if k == 0 and mirror_mode:
                    x_hi //= 2
                for dy in range(box_y - op.h + 1):
                    row_shift = dy * box_x
                    for dx in range(x_hi + 1):
                        attempts += 1
                        if attempts > budget:
                            raise BudgetExceededError(
                                f"oracle stopped after {budget} placement attempts")
                        mask = base << (row_shift + dx)
                        if grid.fits(mask):
                            grid.place(mask)
                            chosen.append(Placement(pieces[k].id, op.orient, dx, dy))
                            if place_from(k + 1):
                                return True
                            chosen.pop()
                            grid.remove(mask)
            return False

        if place_from(0):
            layout = Layout(tuple(chosen), box_x, box_y)
            return OracleResult(box_x + box_y, layout, attempts)
    return None
