"""Global constraints for the packing models.

Four families: orientation-conditional linking of one piece's variables,
pairwise non-overlap of rectangles (with optional containment in a
variable-sized box), rectangular cumulative, and trapezoidal (step
profile) cumulative.

Filtering strength is deliberately time-table plus energy reasoning for
the cumulative forms and pairwise forbidden-region pruning for diffn; on
fully assigned scopes every propagator detects exactly the violations of
its declarative semantics.  Width/height/duration/height parameters may
be plain ints or IntVars; variable parameters are treated conservatively
(by their domain minimum) during filtering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .engine import Infeasible, IntVar, Model, Propagator
from .geometry import Rect

IntOrVar = Union[int, IntVar]


def _vmin(v: IntOrVar) -> int:
    return v if type(v) is int else v.min


def _vmax(v: IntOrVar) -> int:
    return v if type(v) is int else v.max


def _raise_min(v: IntOrVar, bound: int) -> None:
    if type(v) is int:
        if v < bound:
            raise Infeasible
    else:
        v.remove_below(bound)


def _lower_max(v: IntOrVar, bound: int) -> None:
    if type(v) is int:
        if v > bound:
            raise Infeasible
    else:
        v.remove_above(bound)


def _only_vars(items: Iterable[IntOrVar]) -> list[IntVar]:
    return [v for v in items if type(v) is not int]


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _segments(events: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    """Aggregate (time, delta, tag) events into (start, end, height) runs
    with height > 0."""
    return _segments_sorted(sorted(events), skip=-1)


def _segments_sorted(pts: list[tuple[int, int, int]], skip: int) -> list[tuple[int, int, int]]:
    """Sweep pre-sorted events, ignoring those tagged `skip`."""
    segs = []
    h = 0
    prev = None
    i = 0
    n = len(pts)
    while i < n:
        t = pts[i][0]
        if prev is not None and h > 0 and prev < t:
            segs.append((prev, t, h))
        while i < n and pts[i][0] == t:
            if pts[i][2] != skip:
                h += pts[i][1]
            i += 1
        prev = t
    return segs


# -- rectangle non-overlap ---------------------------------------------


@dataclass
class RectView:
    """A rectangle with variable position and possibly variable size."""

    x: IntVar
    y: IntVar
    w: IntOrVar
    h: IntOrVar


class Diffn(Propagator):
    """Pairwise interior-disjoint rectangles, optionally confined to a
    variable box [0, end_x] x [0, end_y].

    Zero-area rectangles conflict with nothing.  Filtering: containment
    bounds, a packed-area bound on the box extents, and for each pair
    with a certain overlap on one axis, disjunction pruning on the other.

    The run method reads domain bounds through the raw bitmasks and only
    calls the trailed narrowing API when a change will happen; cached
    bounds may go stale within one run, which merely weakens (never
    unsounds) the pruning until the fixpoint loop re-runs it.
    """

    __slots__ = ("rects", "end_x", "end_y", "_wc", "_hc")

    def __init__(self, rects: Sequence[RectView],
                 extents: Optional[tuple[IntVar, IntVar]] = None):
        super().__init__()
        if not rects:
            raise ValueError("diffn needs at least one rectangle")
        self.rects = tuple(rects)
        self.end_x, self.end_y = extents if extents else (None, None)
        self._wc = tuple(r.w if type(r.w) is int else None for r in self.rects)
        self._hc = tuple(r.h if type(r.h) is int else None for r in self.rects)

    def variables(self):
        out: list[IntVar] = []
        for r in self.rects:
            out.append(r.x)
            out.append(r.y)
            out.extend(_only_vars((r.w, r.h)))
        if self.end_x is not None:
            out.append(self.end_x)
            out.append(self.end_y)
        return out

    def run(self, model):
        rects = self.rects
        n = len(rects)
        xlo = [0] * n
        xhi = [0] * n
        ylo = [0] * n
        yhi = [0] * n
        wlo = [0] * n
        hlo = [0] * n
        for i, r in enumerate(rects):
            d = r.x.domain
            m = d.mask
            xlo[i] = d.base + ((m & -m).bit_length() - 1)
            xhi[i] = d.base + m.bit_length() - 1
            d = r.y.domain
            m = d.mask
            ylo[i] = d.base + ((m & -m).bit_length() - 1)
            yhi[i] = d.base + m.bit_length() - 1
            wc = self._wc[i]
            if wc is None:
                d = r.w.domain
                m = d.mask
                wlo[i] = d.base + ((m & -m).bit_length() - 1)
            else:
                wlo[i] = wc
            hc = self._hc[i]
            if hc is None:
                d = r.h.domain
                m = d.mask
                hlo[i] = d.base + ((m & -m).bit_length() - 1)
            else:
                hlo[i] = hc

        ex, ey = self.end_x, self.end_y
        if ex is not None:
            exmax, eymax = ex.max, ey.max
            need = 0
            for i, r in enumerate(rects):
                w, h = wlo[i], hlo[i]
                if xlo[i] < 0:
                    r.x.remove_below(0)
                    xlo[i] = 0
                if ylo[i] < 0:
                    r.y.remove_below(0)
                    ylo[i] = 0
                if xhi[i] > exmax - w:
                    r.x.remove_above(exmax - w)
                    xhi[i] = exmax - w
                if yhi[i] > eymax - h:
                    r.y.remove_above(eymax - h)
                    yhi[i] = eymax - h
                if self._wc[i] is None:
                    _lower_max(r.w, exmax - xlo[i])
                if self._hc[i] is None:
                    _lower_max(r.h, eymax - ylo[i])
                if ex.min < xlo[i] + w:
                    ex.remove_below(xlo[i] + w)
                if ey.min < ylo[i] + h:
                    ey.remove_below(ylo[i] + h)
                need += w * h
            if need > 0:
                if need > exmax * eymax:
                    raise Infeasible
                if ex.min * eymax < need:
                    ex.remove_below(_ceil_div(need, eymax))
                if ey.min * exmax < need:
                    ey.remove_below(_ceil_div(need, exmax))

        cxe = [xlo[i] + wlo[i] for i in range(n)]
        cye = [ylo[i] + hlo[i] for i in range(n)]
        for i in range(n - 1):
            xhi_i = xhi[i]
            yhi_i = yhi[i]
            cxe_i = cxe[i]
            cye_i = cye[i]
            nx_i = xhi_i < cxe_i
            ny_i = yhi_i < cye_i
            if not (nx_i or ny_i):
                continue
            for j in range(i + 1, n):
                certain_x = nx_i and xhi[j] < cxe[j] and xhi_i < cxe[j] and xhi[j] < cxe_i
                certain_y = ny_i and yhi[j] < cye[j] and yhi_i < cye[j] and yhi[j] < cye_i
                if certain_x:
                    if certain_y:
                        raise Infeasible
                    hi, hj = hlo[i], hlo[j]
                    if hi > 0 and hj > 0:
                        i_first = cye_i <= yhi[j]
                        j_first = cye[j] <= yhi_i
                        if not i_first and not j_first:
                            raise Infeasible
                        if i_first != j_first:
                            if i_first:
                                lo_var, lo_end, hi_var, hi_len = rects[i], cye_i, rects[j], hi
                            else:
                                lo_var, lo_end, hi_var, hi_len = rects[j], cye[j], rects[i], hj
                            if hi_var.y.min < lo_end:
                                hi_var.y.remove_below(lo_end)
                            cap = hi_var.y.max - hi_len
                            if lo_var.y.max > cap:
                                lo_var.y.remove_above(cap)
                elif certain_y:
                    wi, wj = wlo[i], wlo[j]
                    if wi > 0 and wj > 0:
                        i_first = cxe_i <= xhi[j]
                        j_first = cxe[j] <= xhi_i
                        if not i_first and not j_first:
                            raise Infeasible
                        if i_first != j_first:
                            if i_first:
                                lo_var, lo_end, hi_var, hi_len = rects[i], cxe_i, rects[j], wi
                            else:
                                lo_var, lo_end, hi_var, hi_len = rects[j], cxe[j], rects[i], wj
                            if hi_var.x.min < lo_end:
                                hi_var.x.remove_below(lo_end)
                            cap = hi_var.x.max - hi_len
                            if lo_var.x.max > cap:
                                lo_var.x.remove_above(cap)


class ProductAtLeast(Propagator):
    """x * y >= floor for non-negative x, y.

    Used as a redundant box-capacity bound: a box holding disjoint
    material of known total area cannot have a smaller x*y product.
    """

    __slots__ = ("x", "y", "floor")

    def __init__(self, x: IntVar, y: IntVar, floor: int):
        super().__init__()
        self.x, self.y, self.floor = x, y, floor

    def variables(self):
        return (self.x, self.y)

    def run(self, model):
        floor = self.floor
        if floor <= 0:
            return
        if self.x.max <= 0 or self.y.max <= 0:
            raise Infeasible
        if self.x.min * self.y.max < floor:
            self.x.remove_below(_ceil_div(floor, self.y.max))
        if self.y.min * self.x.max < floor:
            self.y.remove_below(_ceil_div(floor, self.x.max))


# -- rectangular cumulative --------------------------------------------


@dataclass
class CumTask:
    """A task on one axis: an interval of length `dur` starting at
    `origin`, using `height` units of the capped resource."""

    origin: IntVar
    dur: IntOrVar
    height: IntOrVar


class Cumulative(Propagator):
    """Sum of task heights at every point stays within `cap`; every task
    ends by `end`.  Time-table filtering over compulsory parts plus the
    energy bound (which may raise the minimums of `end` and `cap`)."""

    __slots__ = ("tasks", "cap", "end")

    def __init__(self, tasks: Sequence[CumTask], cap: IntOrVar, end: IntOrVar):
        super().__init__()
        self.tasks = tuple(tasks)
        self.cap = cap
        self.end = end

    def variables(self):
        out: list[IntVar] = []
        for t in self.tasks:
            out.append(t.origin)
            out.extend(_only_vars((t.dur, t.height)))
        out.extend(_only_vars((self.cap, self.end)))
        return out

    def run(self, model):
        cap, end = self.cap, self.end
        capmax, endmax = _vmax(cap), _vmax(end)
        energy = 0
        for t in self.tasks:
            dlo = _vmin(t.dur)
            _raise_min(end, t.origin.min + dlo)
            t.origin.remove_above(_vmax(end) - dlo)
            if type(t.dur) is not int:
                t.dur.remove_above(_vmax(end) - t.origin.min)
            energy += dlo * _vmin(t.height)
        endmax = _vmax(end)
        if energy > 0:
            if capmax <= 0 or endmax <= 0 or energy > capmax * endmax:
                raise Infeasible
            _raise_min(end, _ceil_div(energy, capmax))
            _raise_min(cap, _ceil_div(energy, endmax))
        self._time_table(capmax)

    def _time_table(self, capmax: int) -> None:
        events: list[tuple[int, int, int]] = []
        has_comp = set()
        for idx, t in enumerate(self.tasks):
            dlo, hlo = _vmin(t.dur), _vmin(t.height)
            s, e = t.origin.max, t.origin.min + dlo
            if dlo > 0 and hlo > 0 and s < e:
                events.append((s, hlo, idx))
                events.append((e, -hlo, idx))
                has_comp.add(idx)
        if not events:
            return
        events.sort()
        full = _segments_sorted(events, skip=-1)
        peak = max(h for _, _, h in full)
        if peak > capmax:
            raise Infeasible
        _raise_min(self.cap, peak)
        for idx, t in enumerate(self.tasks):
            if t.origin.size == 1:
                continue
            dlo, hlo = _vmin(t.dur), _vmin(t.height)
            if dlo <= 0 or hlo <= 0:
                continue
            rest = full if idx not in has_comp else _segments_sorted(events, skip=idx)
            bad = [(s, e) for s, e, h in rest if h + hlo > capmax]
            if not bad:
                continue
            v = t.origin.min
            for s, e in bad:
                if s < v + dlo and e > v:
                    v = e
            t.origin.remove_below(v)
            v = t.origin.max
            for s, e in reversed(bad):
                if s < v + dlo and e > v:
                    v = s - dlo
            t.origin.remove_above(v)


# -- trapezoidal cumulative --------------------------------------------


@dataclass
class TrapPart:
    """One step of a task profile: `dur` units long, contributing the
    step height on each covered unit (max of the two for ramp steps)."""

    dur: IntOrVar
    start_h: IntOrVar
    end_h: IntOrVar

    @property
    def floor_h(self) -> int:
        """Smallest contribution this part can make per covered unit."""
        return max(_vmin(self.start_h), _vmin(self.end_h))


@dataclass
class TrapTask:
    """A task whose resource usage is a step profile laid out
    consecutively from `origin`."""

    origin: IntVar
    parts: tuple[TrapPart, ...]


class TrapezoidCumulative(Propagator):
    """Like Cumulative but each task contributes a multi-step profile.

    Compulsory parts are computed per step; steps whose offset from the
    task origin is not yet fixed (an earlier step has variable duration)
    are skipped during origin pruning but still checked once fixed.
    """

    __slots__ = ("tasks", "cap", "end")

    def __init__(self, tasks: Sequence[TrapTask], cap: IntOrVar, end: IntOrVar):
        super().__init__()
        self.tasks = tuple(tasks)
        self.cap = cap
        self.end = end

    def variables(self):
        out: list[IntVar] = []
        for t in self.tasks:
            out.append(t.origin)
            for p in t.parts:
                out.extend(_only_vars((p.dur, p.start_h, p.end_h)))
        out.extend(_only_vars((self.cap, self.end)))
        return out

    def run(self, model):
        cap, end = self.cap, self.end
        capmax = _vmax(cap)
        energy = 0
        events: list[tuple[int, int, int]] = []
        for idx, t in enumerate(self.tasks):
            ext_lo = sum(_vmin(p.dur) for p in t.parts)
            _raise_min(end, t.origin.min + ext_lo)
            t.origin.remove_above(_vmax(end) - ext_lo)
            off_lo = off_hi = 0
            for p in t.parts:
                dlo, dhi = _vmin(p.dur), _vmax(p.dur)
                hlo = p.floor_h
                energy += dlo * hlo
                s = t.origin.max + off_hi
                e = t.origin.min + off_lo + dlo
                if dlo > 0 and hlo > 0 and s < e:
                    events.append((s, hlo, idx))
                    events.append((e, -hlo, idx))
                off_lo += dlo
                off_hi += dhi
        endmax = _vmax(end)
        if energy > 0:
            if capmax <= 0 or endmax <= 0 or energy > capmax * endmax:
                raise Infeasible
            _raise_min(end, _ceil_div(energy, capmax))
            _raise_min(cap, _ceil_div(energy, endmax))
        if not events:
            return
        events.sort()
        full = _segments_sorted(events, skip=-1)
        peak = max(h for _, _, h in full)
        if peak > capmax:
            raise Infeasible
        _raise_min(cap, peak)
        has_comp = {tag for _, _, tag in events}
        for idx, t in enumerate(self.tasks):
            if t.origin.size == 1:
                continue
            silhouette = self._silhouette(t)
            if not silhouette:
                continue
            tallest = max(hs for _, _, hs in silhouette)
            rest = full if idx not in has_comp else _segments_sorted(events, skip=idx)
            if all(h + tallest <= capmax for _, _, h in rest):
                continue
            self._sweep_origin(t.origin, silhouette, rest, capmax)

    @staticmethod
    def _silhouette(task: TrapTask) -> list[tuple[int, int, int]]:
        """(offset, length, height) steps certainly covered relative to
        the origin, cut off at the first variable-length step."""
        out = []
        rel = 0
        for p in task.parts:
            dlo, dhi = _vmin(p.dur), _vmax(p.dur)
            hlo = p.floor_h
            if dlo > 0 and hlo > 0:
                out.append((rel, dlo, hlo))
            if dlo != dhi:
                break
            rel += dlo
        return out

    @staticmethod
    def _sweep_origin(origin: IntVar, silhouette, rest, capmax: int) -> None:
        v = origin.min
        moved = True
        while moved:
            moved = False
            for rel, length, hseg in silhouette:
                for s, e, h in rest:
                    if h + hseg > capmax and s < v + rel + length and e > v + rel:
                        v = e - rel
                        moved = True
        origin.remove_below(v)
        v = origin.max
        moved = True
        while moved:
            moved = False
            for rel, length, hseg in silhouette:
                for s, e, h in rest:
                    if h + hseg > capmax and s < v + rel + length and e > v + rel:
                        v = s - rel - length
                        moved = True
        origin.remove_above(v)


# -- orientation linking -----------------------------------------------


@dataclass(frozen=True)
class LinkRow:
    """Geometry constants of one orientation: bounding box, sub-rectangle
    offsets and sizes, and the per-axis profile steps as (dur, height)."""

    orient: int
    w: int
    h: int
    rects: tuple[Rect, ...]
    x_parts: tuple[tuple[int, int], ...]
    y_parts: tuple[tuple[int, int], ...]


@dataclass
class LinkTargets:
    """The variables of one piece bound by its orientation choice."""

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


class OrientationLink(Propagator):
    """Channel between a piece's orientation variable and every variable
    derived from it.

    Each remaining orientation is checked for consistency with the
    current domains and dropped when impossible; targets are pruned to
    the union of the surviving rows' values.  Once the orientation is
    fixed the equalities bind exactly.
    """

    __slots__ = ("orient", "origin_x", "origin_y", "rows", "targets",
                 "_consts", "_offsets")

    def __init__(self, orient: IntVar, origin_x: IntVar, origin_y: IntVar,
                 rows: dict[int, LinkRow], targets: LinkTargets):
        super().__init__()
        self.orient = orient
        self.origin_x = origin_x
        self.origin_y = origin_y
        self.rows = rows
        self.targets = targets
        consts: list[tuple[IntVar, dict[int, int]]] = []
        offsets: list[tuple[IntVar, IntVar, dict[int, int]]] = []

        def const(var, pick):
            consts.append((var, {o: pick(row) for o, row in rows.items()}))

        def offset(var, base, pick):
            offsets.append((var, base, {o: pick(row) for o, row in rows.items()}))

        const(targets.width, lambda r: r.w)
        const(targets.height, lambda r: r.h)
        offset(targets.end_x, origin_x, lambda r: r.w)
        offset(targets.end_y, origin_y, lambda r: r.h)
        for i in range(len(targets.rect_xs)):
            offset(targets.rect_xs[i], origin_x, lambda r, i=i: r.rects[i].x)
            offset(targets.rect_ys[i], origin_y, lambda r, i=i: r.rects[i].y)
            const(targets.rect_ws[i], lambda r, i=i: r.rects[i].w)
            const(targets.rect_hs[i], lambda r, i=i: r.rects[i].h)
        for k in range(len(targets.x_durs)):
            const(targets.x_durs[k], lambda r, k=k: r.x_parts[k][0])
            const(targets.x_heights[k], lambda r, k=k: r.x_parts[k][1])
            const(targets.y_durs[k], lambda r, k=k: r.y_parts[k][0])
            const(targets.y_heights[k], lambda r, k=k: r.y_parts[k][1])
        self._consts = consts
        self._offsets = offsets

    def variables(self):
        out = [self.orient, self.origin_x, self.origin_y]
        out.extend(var for var, _ in self._consts)
        out.extend(var for var, _, _ in self._offsets)
        return out

    def run(self, model):
        orient = self.orient
        od = orient.domain
        if od.mask & (od.mask - 1) == 0:
            # single orientation left: bind every target exactly
            o = od.min
            for var, vals in self._consts:
                val = vals[o]
                d = var.domain
                off = val - d.base
                if off < 0:
                    raise Infeasible
                if d.mask != 1 << off:
                    var.assign(val)
            for var, base, offs in self._offsets:
                off = offs[o]
                bd = base.domain
                bm = bd.mask
                blo = bd.base + ((bm & -bm).bit_length() - 1)
                bhi = bd.base + bm.bit_length() - 1
                vd = var.domain
                vm = vd.mask
                vlo = vd.base + ((vm & -vm).bit_length() - 1)
                vhi = vd.base + vm.bit_length() - 1
                if vlo < blo + off:
                    var.remove_below(blo + off)
                if vhi > bhi + off:
                    var.remove_above(bhi + off)
                if blo < vlo - off:
                    base.remove_below(vlo - off)
                if bhi > vhi - off:
                    base.remove_above(vhi - off)
            return
        for o in orient.values():
            if not self._row_possible(o):
                orient.remove_value(o)
        live = orient.values()
        for var, vals in self._consts:
            allowed = {vals[o] for o in live}
            if len(allowed) == 1:
                var.assign(next(iter(allowed)))
            else:
                for v in var.values():
                    if v not in allowed:
                        var.remove_value(v)
        for var, base, offs in self._offsets:
            omin = min(offs[o] for o in live)
            omax = max(offs[o] for o in live)
            var.remove_below(base.min + omin)
            var.remove_above(base.max + omax)
            base.remove_below(var.min - omax)
            base.remove_above(var.max - omin)

    def _row_possible(self, o: int) -> bool:
        for var, vals in self._consts:
            if not var.contains(vals[o]):
                return False
        for var, base, offs in self._offsets:
            off = offs[o]
            if base.min + off > var.max or base.max + off < var.min:
                return False
        return True


# -- posting helpers ----------------------------------------------------


def post_orientation_link(model: Model, link: OrientationLink) -> OrientationLink:
    model.post(link)
    return link


def post_diffn(model: Model, rects: Sequence[RectView],
               extents: Optional[tuple[IntVar, IntVar]] = None) -> Diffn:
    prop = Diffn(rects, extents)
    model.post(prop)
    return prop


def post_cumulative(model: Model, tasks: Sequence[CumTask],
                    cap: IntOrVar, end: IntOrVar) -> Cumulative:
    prop = Cumulative(tasks, cap, end)
    model.post(prop)
    return prop


def post_trapezoid_cumulative(model: Model, tasks: Sequence[TrapTask],
                              cap: IntOrVar, end: IntOrVar) -> TrapezoidCumulative:
    prop = TrapezoidCumulative(tasks, cap, end)
    model.post(prop)
    return prop
