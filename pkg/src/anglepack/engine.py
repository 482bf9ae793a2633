"""Minimal finite-domain constraint core.

Integer decision variables over bitset domains, a propagation fixpoint
loop over posted propagators, depth-first labeling, and branch-and-bound
minimization of a two-variable objective sum.  Domains only ever shrink;
an emptied domain is signalled with the `Infeasible` exception and never
stored.  State changes are trailed so search can backtrack cheaply.

A Model together with its variables and propagators is single-threaded;
independent models may be solved concurrently without coordination.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class Infeasible(Exception):
    """Raised when a domain narrowing would leave the domain empty."""


class Domain:
    """Finite non-empty set of integers as an offset bitmask.

    Mutators narrow the set and report whether anything changed; a
    mutation that would empty the set raises `Infeasible` and leaves the
    domain untouched.
    """

    __slots__ = ("base", "mask")

    def __init__(self, lo: int, hi: int):
        if lo > hi:
            raise ValueError(f"empty initial domain {lo}..{hi}")
        self.base = lo
        self.mask = (1 << (hi - lo + 1)) - 1

    @property
    def min(self) -> int:
        m = self.mask
        return self.base + ((m & -m).bit_length() - 1)

    @property
    def max(self) -> int:
        return self.base + self.mask.bit_length() - 1

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def contains(self, v: int) -> bool:
        off = v - self.base
        return off >= 0 and (self.mask >> off) & 1 == 1

    def values(self) -> list[int]:
        base, m = self.base, self.mask
        out = []
        while m:
            low = m & -m
            out.append(base + low.bit_length() - 1)
            m ^= low
        return out

    def remove_below(self, v: int) -> bool:
        off = v - self.base
        if off <= 0:
            return False
        new = self.mask & ~((1 << off) - 1) if off < self.mask.bit_length() else 0
        if new == 0:
            raise Infeasible
        if new == self.mask:
            return False
        self.mask = new
        return True

    def remove_above(self, v: int) -> bool:
        off = v - self.base
        if off < 0:
            raise Infeasible
        new = self.mask & ((1 << (off + 1)) - 1)
        if new == 0:
            raise Infeasible
        if new == self.mask:
            return False
        self.mask = new
        return True

    def remove_value(self, v: int) -> bool:
        off = v - self.base
        if off < 0 or (self.mask >> off) & 1 == 0:
            return False
        new = self.mask & ~(1 << off)
        if new == 0:
            raise Infeasible
        self.mask = new
        return True

    def assign(self, v: int) -> bool:
        off = v - self.base
        if off < 0 or (self.mask >> off) & 1 == 0:
            raise Infeasible
        bit = 1 << off
        if self.mask == bit:
            return False
        self.mask = bit
        return True


class IntVar:
    """Integer decision variable owned by one Model.

    Narrowing goes through these wrappers so the model can trail changes
    and wake watching propagators.
    """

    __slots__ = ("model", "idx", "name", "domain", "watchers")

    def __init__(self, model: "Model", idx: int, lo: int, hi: int, name: str):
        self.model = model
        self.idx = idx
        self.name = name
        self.domain = Domain(lo, hi)
        self.watchers: list[Propagator] = []

    @property
    def min(self) -> int:
        return self.domain.min

    @property
    def max(self) -> int:
        return self.domain.max

    @property
    def size(self) -> int:
        return self.domain.size

    @property
    def value(self) -> int:
        """The assigned value; only meaningful once size == 1."""
        return self.domain.min

    def contains(self, v: int) -> bool:
        return self.domain.contains(v)

    def values(self) -> list[int]:
        return self.domain.values()

    def remove_below(self, v: int) -> None:
        old = self.domain.mask
        if self.domain.remove_below(v):
            self.model._changed(self, old)

    def remove_above(self, v: int) -> None:
        old = self.domain.mask
        if self.domain.remove_above(v):
            self.model._changed(self, old)

    def remove_value(self, v: int) -> None:
        old = self.domain.mask
        if self.domain.remove_value(v):
            self.model._changed(self, old)

    def assign(self, v: int) -> None:
        old = self.domain.mask
        if self.domain.assign(v):
            self.model._changed(self, old)

    def __repr__(self) -> str:
        if self.size == 1:
            return f"{self.name}={self.min}"
        return f"{self.name}in{self.min}..{self.max}"


class Propagator:
    """Base class for filtering units.

    Subclasses narrow the domains of their variables in `run` and raise
    `Infeasible` on a wipeout.  Filtering must be sound (never remove a
    value that belongs to a solution of the constraint) and, on a fully
    assigned scope, must fail exactly when the declarative semantics are
    violated.
    """

    __slots__ = ("_queued",)

    def __init__(self) -> None:
        self._queued = False

    def variables(self) -> Iterable[IntVar]:
        raise NotImplementedError

    def run(self, model: "Model") -> None:
        raise NotImplementedError


@dataclass
class SearchStats:
    nodes: int = 0
    fails: int = 0
    solutions: int = 0
    best_objective: Optional[int] = None
    elapsed: float = 0.0
    timed_out: bool = False


class Model:
    """A constraint network: variables, propagators and one objective."""

    def __init__(self) -> None:
        self.vars: list[IntVar] = []
        self.propagators: list[Propagator] = []
        self.objective: Optional[tuple[IntVar, IntVar]] = None
        self.stats = SearchStats()
        self._trail: list[tuple[IntVar, int]] = []
        self._queue: deque[Propagator] = deque()

    def add_var(self, lo: int, hi: int, name: str = "") -> IntVar:
        if lo > hi:
            raise ValueError(f"add_var: lo {lo} > hi {hi}")
        var = IntVar(self, len(self.vars), lo, hi, name or f"v{len(self.vars)}")
        self.vars.append(var)
        return var

    def post(self, prop: Propagator) -> Propagator:
        self.propagators.append(prop)
        for v in prop.variables():
            v.watchers.append(prop)
        self._enqueue(prop)
        return prop

    # -- trail -------------------------------------------------------

    def mark(self) -> int:
        return len(self._trail)

    def undo_to(self, mark: int) -> None:
        trail = self._trail
        while len(trail) > mark:
            var, old = trail.pop()
            var.domain.mask = old

    def _changed(self, var: IntVar, old_mask: int) -> None:
        self._trail.append((var, old_mask))
        enq = self._enqueue
        for p in var.watchers:
            enq(p)

    def _enqueue(self, prop: Propagator) -> None:
        if not prop._queued:
            prop._queued = True
            self._queue.append(prop)

    # -- propagation --------------------------------------------------

    def propagate(self) -> bool:
        """Run every propagator to fixpoint.

        Returns True for a stable fixpoint and False when some domain
        was wiped out.  Domains never widen, so a False result means the
        current state (as narrowed so far) is unsatisfiable.
        """
        for p in self.propagators:
            self._enqueue(p)
        return self._fixpoint()

    def _fixpoint(self) -> bool:
        queue = self._queue
        try:
            while queue:
                p = queue.popleft()
                p._queued = False
                p.run(self)
        except Infeasible:
            while queue:
                queue.popleft()._queued = False
            return False
        return True


# -- primitive constraints used by tests and as building blocks -------


class GeConst(Propagator):
    """x >= c."""

    __slots__ = ("x", "c")

    def __init__(self, x: IntVar, c: int):
        super().__init__()
        self.x, self.c = x, c

    def variables(self):
        return (self.x,)

    def run(self, model):
        self.x.remove_below(self.c)


class LeConst(Propagator):
    """x <= c."""

    __slots__ = ("x", "c")

    def __init__(self, x: IntVar, c: int):
        super().__init__()
        self.x, self.c = x, c

    def variables(self):
        return (self.x,)

    def run(self, model):
        self.x.remove_above(self.c)


class Table(Propagator):
    """The variable tuple must equal one of the listed rows (GAC)."""

    __slots__ = ("vars", "rows")

    def __init__(self, vars: Sequence[IntVar], rows: Iterable[Sequence[int]]):
        super().__init__()
        self.vars = tuple(vars)
        self.rows = tuple(tuple(r) for r in rows)
        if any(len(r) != len(self.vars) for r in self.rows):
            raise ValueError("table row arity mismatch")

    def variables(self):
        return self.vars

    def run(self, model):
        live = [r for r in self.rows if all(v.contains(x) for v, x in zip(self.vars, r))]
        if not live:
            raise Infeasible
        for i, v in enumerate(self.vars):
            allowed = {r[i] for r in live}
            for val in v.values():
                if val not in allowed:
                    v.remove_value(val)


class _ObjectiveBound(Propagator):
    """x + y <= ub, with ub tightened as incumbents are found."""

    __slots__ = ("x", "y", "ub")

    def __init__(self, x: IntVar, y: IntVar):
        super().__init__()
        self.x, self.y = x, y
        self.ub: Optional[int] = None

    def variables(self):
        return (self.x, self.y)

    def run(self, model):
        if self.ub is None:
            return
        self.x.remove_above(self.ub - self.y.min)
        self.y.remove_above(self.ub - self.x.min)


# -- search -----------------------------------------------------------


class _Expired(Exception):
    pass


Solution = dict[IntVar, int]


def label(model: Model, order: Optional[Sequence[IntVar]] = None,
          time_limit: Optional[float] = None) -> Optional[Solution]:
    """Depth-first search for the first full assignment.

    Variables are assigned in the given order (model order by default),
    values ascending.  Any variables left unassigned after the order is
    exhausted are labeled in model order, and every leaf is re-checked by
    a full propagation pass.  Search statistics land in `model.stats`.
    """
    return _solve(model, order, objective=None, time_limit=time_limit)


def minimize(model: Model, objective: Optional[tuple[IntVar, IntVar]] = None,
             order: Optional[Sequence[IntVar]] = None,
             time_limit: Optional[float] = None) -> Optional[Solution]:
    """Branch-and-bound minimization of a two-variable sum.

    After every incumbent with value v the bound objective <= v - 1 is
    enforced and the search continues, so the last incumbent attains the
    true minimum when the search runs to exhaustion.  On time-limit
    expiry the best incumbent so far is returned and
    `model.stats.timed_out` is set.
    """
    objective = objective or model.objective
    if objective is None:
        raise ValueError("minimize: model has no objective")
    return _solve(model, order, objective=objective, time_limit=time_limit)


def _solve(model, order, objective, time_limit):
    stats = SearchStats()
    model.stats = stats
    start = time.perf_counter()
    deadline = None if time_limit is None else start + time_limit
    order = list(order if order is not None else model.vars)

    bound = None
    if objective is not None:
        bound = _ObjectiveBound(objective[0], objective[1])
        model.post(bound)

    best: Optional[Solution] = None

    if not model.propagate():
        stats.elapsed = time.perf_counter() - start
        return None

    def snapshot() -> Solution:
        return {v: v.min for v in model.vars}

    def at_leaf() -> bool:
        """Handle a complete assignment; True stops the search."""
        nonlocal best
        if not model.propagate():
            stats.fails += 1
            return False
        stats.solutions += 1
        if objective is None:
            best = snapshot()
            return True
        value = objective[0].min + objective[1].min
        best = snapshot()
        stats.best_objective = value
        bound.ub = value - 1
        return False

    def descend(seq: list[IntVar], i: int) -> bool:
        while i < len(seq) and seq[i].size == 1:
            i += 1
        if i == len(seq):
            rest = [v for v in model.vars if v.size > 1]
            if rest:
                return descend(rest, 0)
            return at_leaf()
        var = seq[i]
        for val in var.values():
            if deadline is not None and time.perf_counter() > deadline:
                raise _Expired
            if not var.contains(val):
                continue
            stats.nodes += 1
            here = model.mark()
            var.assign(val)
            if bound is not None:
                model._enqueue(bound)
            if model._fixpoint():
                if descend(seq, i + 1):
                    return True
            else:
                stats.fails += 1
            model.undo_to(here)
        return False

    try:
        descend(order, 0)
    except _Expired:
        stats.timed_out = True
    finally:
        if bound is not None:
            bound.ub = None
    stats.elapsed = time.perf_counter() - start
    return best
