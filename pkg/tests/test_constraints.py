import random

import pytest

from anglepack.constraints import (
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
from anglepack.engine import Model
from anglepack.geometry import AnglePiece, cells, decompose, orientations, profiles
from helpers import (
    assignment_count,
    check_propagator_against_brute_force,
    cumulative_holds,
    diffn_holds,
    trapezoid_holds,
    value_of,
    var_or_const,
)


# -- diffn examples ------------------------------------------------------------


def test_diffn_fixed_overlap_fails():
    m = Model()
    r1 = RectView(m.add_var(0, 0), m.add_var(0, 0), 1, 1)
    r2 = RectView(m.add_var(0, 0), m.add_var(0, 0), 1, 1)
    post_diffn(m, [r1, r2])
    assert not m.propagate()


def test_diffn_prunes_across_certain_overlap():
    m = Model()
    a = RectView(m.add_var(0, 4), m.add_var(0, 0), 2, 2)
    b = RectView(m.add_var(1, 1), m.add_var(0, 0), 2, 2)
    post_diffn(m, [a, b])
    assert m.propagate()
    assert (a.x.min, a.x.max) == (3, 4)


def test_diffn_zero_area_conflicts_with_nothing():
    m = Model()
    a = RectView(m.add_var(0, 5), m.add_var(0, 5), 0, 3)
    b = RectView(m.add_var(0, 0), m.add_var(0, 0), 4, 4)
    post_diffn(m, [a, b])
    assert m.propagate()
    assert a.x.size == 6


def test_diffn_containment_and_extent_lift():
    m = Model()
    ex, ey = m.add_var(1, 9), m.add_var(1, 9)
    a = RectView(m.add_var(0, 8), m.add_var(0, 8), 3, 2)
    post_diffn(m, [a], extents=(ex, ey))
    assert m.propagate()
    assert a.x.max == 6 and a.y.max == 7
    assert ex.min == 3 and ey.min == 2


def test_diffn_area_bound_on_extents():
    m = Model()
    ex, ey = m.add_var(1, 3), m.add_var(1, 3)
    rects = [RectView(m.add_var(0, 2), m.add_var(0, 2), 2, 2) for _ in range(3)]
    post_diffn(m, rects, extents=(ex, ey))
    assert not m.propagate()  # 12 cells cannot fit a 3x3 box


def test_product_at_least():
    m = Model()
    x, y = m.add_var(1, 9), m.add_var(1, 9)
    m.post(ProductAtLeast(x, y, 81))
    assert m.propagate()
    assert x.min == 9 and y.min == 9
    m2 = Model()
    x2, y2 = m2.add_var(1, 8), m2.add_var(1, 9)
    m2.post(ProductAtLeast(x2, y2, 81))
    assert not m2.propagate()


# -- cumulative examples ---------------------------------------------------------


def test_cumulative_overload_fails():
    m = Model()
    cap, end = m.add_var(1, 1), m.add_var(1, 9)
    post_cumulative(m, [CumTask(m.add_var(0, 0), 2, 1), CumTask(m.add_var(0, 0), 2, 1)],
                    cap, end)
    assert not m.propagate()


def test_cumulative_end_raised_by_tasks():
    m = Model()
    cap, end = m.add_var(2, 2), m.add_var(1, 9)
    post_cumulative(m, [CumTask(m.add_var(0, 0), 2, 1), CumTask(m.add_var(0, 0), 2, 1)],
                    cap, end)
    assert m.propagate()
    assert end.min == 2


def test_cumulative_energy_raises_end():
    m = Model()
    cap, end = m.add_var(2, 2), m.add_var(1, 9)
    post_cumulative(m, [CumTask(m.add_var(0, 7), 2, 2) for _ in range(3)], cap, end)
    assert m.propagate()
    assert end.min == 6


def test_cumulative_time_table_moves_task():
    m = Model()
    cap, end = m.add_var(1, 1), m.add_var(4, 9)
    fixed = CumTask(m.add_var(0, 0), 2, 1)
    roaming = CumTask(m.add_var(0, 6), 2, 1)
    post_cumulative(m, [fixed, roaming], cap, end)
    assert m.propagate()
    assert roaming.origin.min == 2


def test_cumulative_raises_cap_min():
    m = Model()
    cap, end = m.add_var(1, 5), m.add_var(1, 9)
    post_cumulative(m, [CumTask(m.add_var(1, 1), 3, 2), CumTask(m.add_var(2, 2), 3, 2)],
                    cap, end)
    assert m.propagate()
    assert cap.min == 4  # both tasks certainly overlap on [2, 4)


# -- trapezoid examples -----------------------------------------------------------


def test_trapezoid_overload_fails():
    m = Model()
    cap, end = m.add_var(3, 3), m.add_var(1, 9)
    parts = lambda: (TrapPart(2, 3, 3), TrapPart(2, 1, 1))
    post_trapezoid_cumulative(
        m, [TrapTask(m.add_var(0, 0), parts()), TrapTask(m.add_var(0, 0), parts())],
        cap, end)
    assert not m.propagate()


def test_trapezoid_interlocking_profiles_fit():
    m = Model()
    cap, end = m.add_var(2, 2), m.add_var(1, 9)
    post_trapezoid_cumulative(m, [
        TrapTask(m.add_var(0, 0), (TrapPart(1, 1, 1), TrapPart(1, 2, 2))),
        TrapTask(m.add_var(0, 0), (TrapPart(1, 1, 1),)),
    ], cap, end)
    assert m.propagate()


def test_trapezoid_single_task_no_pruning():
    m = Model()
    cap, end = m.add_var(5, 5), m.add_var(6, 9)
    task = TrapTask(m.add_var(0, 3), (TrapPart(2, 3, 3), TrapPart(1, 1, 1)))
    post_trapezoid_cumulative(m, [task], cap, end)
    assert m.propagate()
    assert (task.origin.min, task.origin.max) == (0, 3)


def test_trapezoid_extent_bounds_origin():
    m = Model()
    cap, end = m.add_var(9, 9), m.add_var(1, 5)
    task = TrapTask(m.add_var(0, 8), (TrapPart(2, 1, 1), TrapPart(2, 2, 2)))
    post_trapezoid_cumulative(m, [task], cap, end)
    assert m.propagate()
    assert task.origin.max == 1  # origin + 4 <= 5


def test_trapezoid_ramp_part_uses_worst_height():
    m = Model()
    cap, end = m.add_var(2, 2), m.add_var(1, 9)
    post_trapezoid_cumulative(m, [
        TrapTask(m.add_var(0, 0), (TrapPart(2, 1, 3),)),
        TrapTask(m.add_var(0, 0), (TrapPart(2, 1, 1),)),
    ], cap, end)
    assert not m.propagate()  # ramp counts as max(1, 3) = 3 per unit


# -- orientation link --------------------------------------------------------------


def _link_model(piece, mode, mx=8, my=8):
    m = Model()
    ops = orientations(piece, mode)
    rows = {}
    for op in ops:
        xp, yp = profiles(op)
        rows[op.orient] = LinkRow(
            op.orient, op.w, op.h, op.rects,
            tuple((p.dur, p.start_h) for p in xp.parts),
            tuple((p.dur, p.start_h) for p in yp.parts),
        )
    nrects = len(ops[0].rects)
    nparts = len(rows[ops[0].orient].x_parts)
    px, py = m.add_var(0, mx - 1, "px"), m.add_var(0, my - 1, "py")
    orient = m.add_var(0, 7, "o")
    for v in orient.values():
        if v not in rows:
            orient.remove_value(v)
    targets = LinkTargets(
        width=m.add_var(1, mx, "w"), height=m.add_var(1, my, "h"),
        end_x=m.add_var(1, mx, "ex"), end_y=m.add_var(1, my, "ey"),
        rect_xs=tuple(m.add_var(0, mx - 1) for _ in range(nrects)),
        rect_ys=tuple(m.add_var(0, my - 1) for _ in range(nrects)),
        rect_ws=tuple(m.add_var(1, mx) for _ in range(nrects)),
        rect_hs=tuple(m.add_var(1, my) for _ in range(nrects)),
        x_durs=tuple(m.add_var(1, mx) for _ in range(nparts)),
        x_heights=tuple(m.add_var(1, my) for _ in range(nparts)),
        y_durs=tuple(m.add_var(1, my) for _ in range(nparts)),
        y_heights=tuple(m.add_var(1, mx) for _ in range(nparts)),
    )
    link = OrientationLink(orient, px, py, rows, targets)
    post_orientation_link(m, link)
    return m, px, py, orient, targets, rows


def test_link_fixed_mode_binds_everything():
    piece = AnglePiece(1, 2, 4, 3, 1)
    m, px, py, orient, targets, rows = _link_model(piece, "fixed")
    px.assign(2)
    py.assign(1)
    assert m.propagate()
    assert targets.width.value == 3 and targets.height.value == 4
    assert targets.end_x.value == 5 and targets.end_y.value == 5
    op = decompose(piece)
    got = {(x.value, y.value, w.value, h.value)
           for x, y, w, h in zip(targets.rect_xs, targets.rect_ys,
                                 targets.rect_ws, targets.rect_hs)}
    assert got == {(2 + r.x, 1 + r.y, r.w, r.h) for r in op.rects}


def test_link_rectangle_couples_dims():
    piece = AnglePiece(1, 2, 3, 2, 3)
    m, px, py, orient, targets, rows = _link_model(piece, "rot_mirror")
    assert m.propagate()
    assert orient.size == 2
    targets.width.assign(2)
    assert m.propagate()
    assert targets.height.value == 3
    assert orient.size == 1


def test_link_prunes_rows_beyond_strip():
    piece = AnglePiece(1, 3, 7, 7, 2)  # bounding boxes 7x7 in every orientation
    m, px, py, orient, targets, rows = _link_model(piece, "rot_mirror", mx=8, my=8)
    px.remove_below(3)  # only 5 columns left, 7-wide rows must go
    assert not m.propagate()  # every orientation is 7x7: nothing fits


def test_link_width_filter_halves_orientations():
    piece = AnglePiece(1, 2, 5, 4, 3)  # 4x5 box: orientations 4x5 and 5x4
    m, px, py, orient, targets, rows = _link_model(piece, "rot_mirror", mx=9, my=9)
    assert m.propagate()
    widths = {rows[o].w for o in orient.values()}
    assert widths == {4, 5}
    targets.end_x.remove_above(4)  # strips wider than 4 are gone
    assert m.propagate()
    assert {rows[o].w for o in orient.values()} == {4}


# -- randomized soundness (propagation vs brute force) ------------------------------


def _random_diffn(rng):
    m = Model()
    ends = None
    if rng.random() < 0.5:
        ends = (m.add_var(1, rng.randint(2, 4)), m.add_var(1, rng.randint(2, 4)))
    rects = []
    for _ in range(rng.randint(2, 3)):
        rects.append(RectView(
            m.add_var(0, rng.randint(0, 3)),
            m.add_var(0, rng.randint(0, 3)),
            var_or_const(m, rng, 0, 3, 0.3),
            var_or_const(m, rng, 0, 3, 0.3),
        ))
    post_diffn(m, rects, extents=ends)

    def holds(assignment):
        vals = [tuple(value_of(f, assignment) for f in (r.x, r.y, r.w, r.h))
                for r in rects]
        end_vals = None
        if ends is not None:
            end_vals = (value_of(ends[0], assignment), value_of(ends[1], assignment))
        return diffn_holds(vals, end_vals)

    return m, holds


def _random_cumulative(rng):
    m = Model()
    cap = var_or_const(m, rng, 0, 3, 0.5)
    end = m.add_var(1, rng.randint(2, 5))
    tasks = [
        CumTask(m.add_var(0, rng.randint(0, 3)),
                var_or_const(m, rng, 0, 2, 0.3),
                var_or_const(m, rng, 0, 2, 0.3))
        for _ in range(rng.randint(2, 3))
    ]
    post_cumulative(m, tasks, cap, end)

    def holds(assignment):
        vals = [(value_of(t.origin, assignment), value_of(t.dur, assignment),
                 value_of(t.height, assignment)) for t in tasks]
        return cumulative_holds(vals, value_of(cap, assignment), value_of(end, assignment))

    return m, holds


def _random_trapezoid(rng):
    m = Model()
    cap = var_or_const(m, rng, 1, 3, 0.5)
    end = m.add_var(1, rng.randint(3, 6))
    tasks = []
    for _ in range(rng.randint(1, 2)):
        parts = tuple(
            TrapPart(var_or_const(m, rng, 1, 2, 0.25),
                     var_or_const(m, rng, 0, 2, 0.25),
                     var_or_const(m, rng, 0, 2, 0.25))
            for _ in range(rng.randint(1, 2))
        )
        tasks.append(TrapTask(m.add_var(0, rng.randint(0, 3)), parts))
    post_trapezoid_cumulative(m, tasks, cap, end)

    def holds(assignment):
        vals = [
            (value_of(t.origin, assignment),
             tuple((value_of(p.dur, assignment), value_of(p.start_h, assignment),
                    value_of(p.end_h, assignment)) for p in t.parts))
            for t in tasks
        ]
        return trapezoid_holds(vals, value_of(cap, assignment), value_of(end, assignment))

    return m, holds


@pytest.mark.parametrize("family,n", [
    (_random_diffn, 40),
    (_random_cumulative, 40),
    (_random_trapezoid, 40),
])
def test_randomized_soundness(family, n):
    rng = random.Random(hash(family.__name__) & 0xFFFF)
    for i in range(n):
        m, holds = family(rng)
        assert assignment_count(m) <= 10 ** 6
        check_propagator_against_brute_force(m, holds)


# -- redundancy of the cumulative relaxations ----------------------------------------


def _fixed_layout_models(layout_pieces):
    """Build fixed models over an already-placed set of oriented pieces and
    report whether each propagator family accepts the assignment."""
    placements = []  # (op, x, y)
    occupied = set()
    x_cursor = 0
    for piece in layout_pieces:
        op = decompose(piece)
        placements.append((op, x_cursor, 0))
        occupied |= cells(op, (x_cursor, 0))
        x_cursor += op.w
    end_x = max(c for c, _ in occupied) + 1
    end_y = max(r for _, r in occupied) + 1
    return placements, end_x, end_y


@pytest.mark.parametrize("sides", [
    [(2, 4, 3, 1), (2, 1, 4, 3)],
    [(1, 2, 2, 1), (1, 1, 1, 1), (2, 2, 1, 3)],
])
def test_relaxations_accept_every_diffn_layout(sides):
    pieces = [AnglePiece(i + 1, *s) for i, s in enumerate(sides)]
    placements, end_x, end_y = _fixed_layout_models(pieces)

    m = Model()
    exv, eyv = m.add_var(end_x, end_x), m.add_var(end_y, end_y)
    rect_views = []
    trap_x, trap_y = [], []
    cum_x, cum_y = [], []
    for op, x, y in placements:
        for r in op.rects:
            rx, ry = m.add_var(x + r.x, x + r.x), m.add_var(y + r.y, y + r.y)
            rect_views.append(RectView(rx, ry, r.w, r.h))
            cum_x.append(CumTask(rx, r.w, r.h))
            cum_y.append(CumTask(ry, r.h, r.w))
        xp, yp = profiles(op)
        trap_x.append(TrapTask(m.add_var(x, x), tuple(
            TrapPart(p.dur, p.start_h, p.end_h) for p in xp.parts)))
        trap_y.append(TrapTask(m.add_var(y, y), tuple(
            TrapPart(p.dur, p.start_h, p.end_h) for p in yp.parts)))
    post_diffn(m, rect_views, extents=(exv, eyv))
    post_cumulative(m, cum_x, eyv, exv)
    post_cumulative(m, cum_y, exv, eyv)
    post_trapezoid_cumulative(m, trap_x, eyv, exv)
    post_trapezoid_cumulative(m, trap_y, exv, eyv)
    assert m.propagate()  # side-by-side placement is valid, so all must accept


def test_trapezoid_and_rectangular_material_agree():
    rng = random.Random(7)
    for _ in range(30):
        piece = AnglePiece(1, *(rng.randint(1, 5) for _ in range(4)))
        for op in orientations(piece, "rot_mirror"):
            x0 = rng.randint(0, 3)
            xp, _ = profiles(op)
            trap_profile: dict[int, int] = {}
            pos = x0
            for part in xp.parts:
                for t in range(pos, pos + part.dur):
                    trap_profile[t] = trap_profile.get(t, 0) + part.start_h
                pos += part.dur
            rect_profile: dict[int, int] = {}
            for r in op.rects:
                for t in range(x0 + r.x, x0 + r.x + r.w):
                    rect_profile[t] = rect_profile.get(t, 0) + r.h
            assert trap_profile == rect_profile
