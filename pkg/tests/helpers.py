"""Shared test utilities: brute-force constraint semantics (cell grids
and profile sweeps, independent of the propagators), micro-model
generators, and exhaustive enumeration harnesses."""

from __future__ import annotations

import itertools
import random

from anglepack.engine import Infeasible, IntVar, Model
from anglepack.geometry import AnglePiece
from anglepack.models import Instance


# -- declarative semantics, evaluated by brute force ---------------------


def diffn_holds(rect_vals, ends=None) -> bool:
    """rect_vals: (x, y, w, h) tuples; ends: optional (end_x, end_y)."""
    seen = set()
    for x, y, w, h in rect_vals:
        if ends is not None:
            if x < 0 or y < 0 or x + w > ends[0] or y + h > ends[1]:
                return False
        for cx in range(x, x + w):
            for cy in range(y, y + h):
                if (cx, cy) in seen:
                    return False
                seen.add((cx, cy))
    return True


def cumulative_holds(task_vals, cap, end) -> bool:
    """task_vals: (origin, dur, height) tuples."""
    points = set()
    for o, d, h in task_vals:
        if o + d > end:
            return False
        points.update(range(o, o + d))
    for t in points:
        load = sum(h for o, d, h in task_vals if o <= t < o + d)
        if load > cap:
            return False
    return True


def trapezoid_holds(task_vals, cap, end) -> bool:
    """task_vals: (origin, ((dur, s, e), ...)) tuples."""
    loads: dict[int, int] = {}
    for o, parts in task_vals:
        if o + sum(p[0] for p in parts) > end:
            return False
        pos = o
        for dur, s, e in parts:
            for t in range(pos, pos + dur):
                loads[t] = loads.get(t, 0) + max(s, e)
            pos += dur
    return all(v <= cap for v in loads.values())


# -- enumeration harness --------------------------------------------------


def var_or_const(model: Model, rng: random.Random, lo: int, hi: int, p_var: float):
    if rng.random() < p_var:
        a = rng.randint(lo, hi)
        b = rng.randint(lo, hi)
        return model.add_var(min(a, b), max(a, b))
    return rng.randint(lo, hi)


def value_of(v, assignment):
    return assignment[v] if isinstance(v, IntVar) else v


def all_assignments(model: Model):
    """Cartesian product over the *current* domains of all variables."""
    domains = [v.values() for v in model.vars]
    for combo in itertools.product(*domains):
        yield dict(zip(model.vars, combo))


def assignment_count(model: Model) -> int:
    n = 1
    for v in model.vars:
        n *= v.size
    return n


def accepts(model: Model, assignment) -> bool:
    """Does propagation accept this full assignment?"""
    mark = model.mark()
    try:
        for var, val in assignment.items():
            var.assign(val)
    except Infeasible:
        model.undo_to(mark)
        return False
    ok = model.propagate()
    model.undo_to(mark)
    return ok


def check_propagator_against_brute_force(model: Model, holds) -> int:
    """Assert soundness and checking-completeness of the posted model.

    `holds(assignment)` must evaluate the declarative semantics.  Returns
    the number of solutions found (for test statistics).
    """
    initial = {v: v.values() for v in model.vars}
    root_ok = model.propagate()

    solutions = [a for a in all_assignments_from(initial) if holds(a)]
    if not root_ok:
        assert not solutions, "propagation failed but solutions exist"
        return 0
    # no solution value may have been pruned at the root
    for v, before in initial.items():
        remaining = set(v.values())
        for val in before:
            if val in remaining:
                continue
            assert all(sol[v] != val for sol in solutions), (
                f"{v} lost value {val} that appears in a solution")
    # checking-completeness on every full assignment over the original domains
    for assignment in all_assignments_from(initial):
        expected = holds(assignment)
        got = accepts(model, assignment)
        assert got == expected, (
            f"propagation {'accepted' if got else 'rejected'} {assignment}, "
            f"brute force says {expected}")
    return len(solutions)


def all_assignments_from(domains):
    vs = list(domains)
    for combo in itertools.product(*(domains[v] for v in vs)):
        yield dict(zip(vs, combo))


# -- random instances -----------------------------------------------------


def random_instance(rng: random.Random, max_pieces: int = 4, max_dim: int = 4,
                    caps: tuple[int, int] = (7, 7)) -> Instance:
    n = rng.randint(1, max_pieces)
    pieces = tuple(
        AnglePiece(i, *(rng.randint(1, max_dim) for _ in range(4)))
        for i in range(1, n + 1)
    )
    mode = rng.choice(("fixed", "rot_mirror"))
    return Instance(pieces, caps[0], caps[1], mode)


TABLE1_SIDES = [[2, 4, 3, 1], [2, 2, 1, 3], [1, 3, 3, 2], [2, 1, 4, 3], [1, 7, 2, 2],
                [1, 2, 5, 5], [6, 2, 2, 3], [4, 2, 2, 1], [3, 1, 1, 4], [3, 2, 1, 1]]
TABLE2_SIDES = [[3, 7, 7, 2], [2, 10, 3, 7], [2, 5, 4, 3], [3, 8, 5, 2]]


def table1_instance() -> Instance:
    pieces = tuple(AnglePiece(i, *s) for i, s in enumerate(TABLE1_SIDES, start=1))
    return Instance(pieces, 9, 9, "fixed")


def table2_instance() -> Instance:
    pieces = tuple(AnglePiece(i, *s) for i, s in enumerate(TABLE2_SIDES, start=1))
    return Instance(pieces, 10, 10, "rot_mirror")
