"""Pointwise algebra on piecewise-linear functions: sums, scaling, clipping, level sets."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional

from .graph import BACKWARD, MetricGraph, Piece, PiecewiseLinearFn, PointRef
from .numeric import Number


def _crossing(p: Piece, level: Number) -> Optional[Number]:
    """Offset strictly inside ``p`` where it crosses ``level``, if any."""
    lo, hi = sorted((p.v0, p.v1))
    if not lo < level < hi:
        return None
    return p.t0 + (level - p.v0) * (p.t1 - p.t0) / (p.v1 - p.v0)


def refine(f: PiecewiseLinearFn, cuts: dict[int, list[Number]]) -> PiecewiseLinearFn:
    """Same function with extra breakpoints inserted at the given offsets."""
    pieces = {}
    for eid, ps in f.pieces.items():
        extra = sorted(set(cuts.get(eid, ())))
        out = []
        for p in ps:
            inner = [t for t in extra if p.t0 < t < p.t1]
            knots = [p.t0] + inner + [p.t1]
            for lo, hi in zip(knots, knots[1:]):
                out.append(Piece(lo, hi, p.at(lo), p.at(hi)))
        pieces[eid] = tuple(out)
    return PiecewiseLinearFn(pieces, dict(f.vertex_values), dict(f.overrides))


def pointwise(f: PiecewiseLinearFn, op: Callable[[Number], Number]) -> PiecewiseLinearFn:
    """Apply ``op`` to every stored value; valid when ``op`` is affine on each piece."""
    return PiecewiseLinearFn(
        {eid: tuple(Piece(p.t0, p.t1, op(p.v0), op(p.v1)) for p in ps) for eid, ps in f.pieces.items()},
        {k: op(v) for k, v in f.vertex_values.items()},
        {k: op(v) for k, v in f.overrides.items()},
    )


def scale(f: PiecewiseLinearFn, c: Number) -> PiecewiseLinearFn:
    return pointwise(f, lambda v: c * v)


def clip(g: MetricGraph, f: PiecewiseLinearFn, lo: Optional[Number] = None, hi: Optional[Number] = None) -> PiecewiseLinearFn:
    """``max(lo, min(hi, f))`` with breakpoints inserted where ``f`` crosses the levels."""
    cuts: dict[int, list[Number]] = {}
    for eid, ps in f.pieces.items():
        for p in ps:
            for level in (lo, hi):
                if level is not None:
                    t = _crossing(p, level)
                    if t is not None:
                        cuts.setdefault(eid, []).append(t)
    fine = refine(f, cuts)

    def op(v: Number) -> Number:
        if lo is not None and v < lo:
            v = lo
        if hi is not None and v > hi:
            v = hi
        return v

    return _normalize_overrides(g, pointwise(fine, op))


def add(g: MetricGraph, f: PiecewiseLinearFn, w: PiecewiseLinearFn) -> PiecewiseLinearFn:
    """Pointwise sum, with point values summed at every critical point of either."""
    cuts = {e.id: f.critical_offsets(g, e.id) + w.critical_offsets(g, e.id) for e in g.edges}
    ff, ww = refine(f, cuts), refine(w, cuts)
    pieces = {}
    for e in g.edges:
        pieces[e.id] = tuple(
            Piece(a.t0, a.t1, a.v0 + b.v0, a.v1 + b.v1) for a, b in zip(ff.pieces[e.id], ww.pieces[e.id])
        )
    vvals = {v.id: f.value(g, PointRef(vertex=v.id)) + w.value(g, PointRef(vertex=v.id)) for v in g.vertices}
    keys = set(f.overrides) | set(w.overrides)
    overrides = {k: f.value(g, PointRef(edge=k[0], t=k[1])) + w.value(g, PointRef(edge=k[0], t=k[1])) for k in keys}
    return _normalize_overrides(g, PiecewiseLinearFn(pieces, vvals, overrides))


def _normalize_overrides(g: MetricGraph, f: PiecewiseLinearFn) -> PiecewiseLinearFn:
    # drop overrides equal to the right-piece default
    keep = {k: v for k, v in f.overrides.items() if f.limit(k[0], k[1], BACKWARD) != v}
    return PiecewiseLinearFn(f.pieces, f.vertex_values, keep)


def with_point_value(g: MetricGraph, f: PiecewiseLinearFn, p: PointRef, value: Number) -> PiecewiseLinearFn:
    """Copy of ``f`` whose value at ``p`` is ``value``."""
    if p.vertex is not None:
        vvals = dict(f.vertex_values)
        vvals[p.vertex] = value
        return PiecewiseLinearFn(f.pieces, vvals, f.overrides)
    overrides = dict(f.overrides)
    overrides[(p.edge, p.t)] = value
    return _normalize_overrides(g, PiecewiseLinearFn(f.pieces, f.vertex_values, overrides))


def superlevel_indicator(g: MetricGraph, f: PiecewiseLinearFn, t: Number) -> PiecewiseLinearFn:
    """The 0/1 function of ``{f > t}``, point values taken from ``f`` itself."""
    one, zero = Fraction(1), Fraction(0)
    pieces: dict[int, tuple[Piece, ...]] = {}
    overrides: dict[tuple[int, Number], Number] = {}
    for e in g.edges:
        out: list[Piece] = []
        point_vals: dict[Number, Number] = {}
        for p in f.pieces[e.id]:
            knots = [p.t0]
            cross = _crossing(p, t)
            if cross is not None:
                knots.append(cross)
                point_vals[cross] = t
            knots.append(p.t1)
            for lo, hi in zip(knots, knots[1:]):
                mid = p.at((lo + hi) / 2)
                val = one if mid > t else zero
                out.append(Piece(lo, hi, val, val))
        ps = tuple(out)
        pieces[e.id] = ps
        starts = [p.t0 for p in ps]
        for idx, p in enumerate(ps[1:], start=1):
            s = p.t0
            raw = point_vals.get(s)
            if raw is None:
                raw = f.value(g, PointRef(edge=e.id, t=s))
            val = one if raw > t else zero
            if val != ps[idx].v0:
                overrides[(e.id, s)] = val
        for (eid, s), raw in f.overrides.items():
            if eid == e.id and s not in starts:
                # isolated override inside a piece
                val = one if raw > t else zero
                right = ps[max(i for i, st in enumerate(starts) if st <= s)].v0
                if val != right:
                    overrides[(eid, s)] = val
    vvals = {v.id: (one if f.value(g, PointRef(vertex=v.id)) > t else zero) for v in g.vertices}
    return PiecewiseLinearFn(pieces, vvals, overrides)

