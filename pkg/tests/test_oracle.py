import random

import pytest

from anglepack.geometry import AnglePiece, piece_area, validate_layout
from anglepack.models import Instance
from anglepack.oracle import BudgetExceededError, brute_force_optimal
from helpers import random_instance, table2_instance


def inst(sides, caps=(6, 6), mode="fixed"):
    pieces = tuple(AnglePiece(i + 1, *s) for i, s in enumerate(sides))
    return Instance(pieces, caps[0], caps[1], mode)


def test_single_tromino():
    r = brute_force_optimal(inst([(1, 2, 2, 1)]))
    assert r.objective == 4
    assert (r.layout.end_x, r.layout.end_y) == (2, 2)


def test_two_unit_squares():
    r = brute_force_optimal(inst([(1, 1, 1, 1), (1, 1, 1, 1)], caps=(2, 2)))
    assert r.objective == 3


def test_square_fills_the_notch():
    r = brute_force_optimal(inst([(1, 2, 2, 1), (1, 1, 1, 1)]))
    assert r.objective == 4


def test_infeasible_returns_none():
    assert brute_force_optimal(inst([(1, 11, 2, 2)], caps=(10, 10))) is None


def test_budget_refusal_is_distinct():
    big = inst([(2, 4, 3, 1), (2, 1, 4, 3), (1, 3, 3, 2), (2, 2, 1, 3)], caps=(9, 9))
    with pytest.raises(BudgetExceededError):
        brute_force_optimal(big, budget=5)


def test_layouts_validate_and_fit():
    rng = random.Random(99)
    for _ in range(25):
        instance = random_instance(rng, max_pieces=3, max_dim=3, caps=(6, 6))
        r = brute_force_optimal(instance)
        if r is None:
            continue
        report = validate_layout(instance, r.layout)
        assert report.ok
        assert r.layout.end_x * r.layout.end_y >= sum(piece_area(p) for p in instance.pieces)


def test_objective_invariant_under_piece_permutation():
    rng = random.Random(4242)
    for _ in range(12):
        instance = random_instance(rng, max_pieces=3, max_dim=3, caps=(6, 6))
        base = brute_force_optimal(instance)
        order = list(instance.pieces)
        rng.shuffle(order)
        renumbered = tuple(
            AnglePiece(i + 1, p.a, p.b, p.c, p.d) for i, p in enumerate(order))
        permuted = brute_force_optimal(
            Instance(renumbered, instance.max_end_x, instance.max_end_y, instance.mode))
        if base is None:
            assert permuted is None
        else:
            assert permuted is not None and permuted.objective == base.objective


def test_monotone_in_added_pieces():
    rng = random.Random(11)
    for _ in range(10):
        instance = random_instance(rng, max_pieces=3, max_dim=3, caps=(7, 7))
        smaller = Instance(instance.pieces[:1], 7, 7, instance.mode)
        small = brute_force_optimal(smaller)
        full = brute_force_optimal(instance)
        assert small is not None
        if full is not None:
            assert full.objective >= small.objective


def test_example2_objective():
    r = brute_force_optimal(table2_instance())
    assert r.objective == 20
    assert validate_layout(table2_instance(), r.layout).ok
