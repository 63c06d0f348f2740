"""One-dimensional Hausdorff measure of edge subsets and metric balls.

Balls are open.  The measure of a subset is the total length of its edge
intervals, which equals H^1 because validated graphs have no overlapping edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .graph import AMBIENT, EdgeSubset, MetricGraph, PointRef, Interval
from .numeric import Number, sqrt


@dataclass(frozen=True)
class BallSpec:
    center: PointRef
    radius: Number

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def scaled(self, factor: Number) -> "BallSpec":
        return BallSpec(self.center, self.radius * factor)


def h1_total(g: MetricGraph) -> Number:
    return g.total_length


def h1_of_subset(g: MetricGraph, s: EdgeSubset) -> Number:
    total: Number = Fraction(0)
    for eid in sorted(s.intervals):
        for a, b in s.intervals[eid]:
            total += b - a
    return total


def _zero(length: Number) -> Number:
    return 0.0 if isinstance(length, float) else Fraction(0)


def _geodesic_trace(g: MetricGraph, center: PointRef, r: Number) -> dict[int, list[Interval]]:
    dist = g.vertex_distances(center)
    out: dict[int, list[Interval]] = {}
    for e in g.edges:
        ivs = []
        reach_u = r - dist[e.u]
        if reach_u > 0:
            ivs.append((_zero(e.length), min(e.length, reach_u)))
        reach_v = r - dist[e.v]
        if reach_v > 0:
            ivs.append((max(_zero(e.length), e.length - reach_v), e.length))
        if center.edge == e.id:
            ivs.append((max(_zero(e.length), center.t - r), min(e.length, center.t + r)))
        if ivs:
            out[e.id] = ivs
    return out


def _ambient_trace(g: MetricGraph, center: PointRef, r: Number) -> dict[int, list[Interval]]:
    cx, cy = g.coords(center)
    out: dict[int, list[Interval]] = {}
    for e in g.edges:
        x0, y0 = g.coords(PointRef(vertex=e.u))
        x1, y1 = g.coords(PointRef(vertex=e.v))
        dx, dy = x1 - x0, y1 - y0
        px, py = x0 - cx, y0 - cy
        # |p + s d|^2 < r^2 for s in [0, 1], via the closest parameter and the
        # squared distance to the carrying line (no cancellation for tiny r)
        a = dx * dx + dy * dy
        s_c = -(dx * px + dy * py) / a
        room = r * r - (dx * py - dy * px) ** 2 / a
        if room <= 0:
            continue
        half = sqrt(room / a)
        lo, hi = max(s_c - half, 0), min(s_c + half, 1)
        if lo < hi:
            out[e.id] = [(lo * e.length if lo else _zero(e.length), hi * e.length if hi != 1 else e.length)]
    return out


def ball_subset(g: MetricGraph, b: BallSpec | PointRef, r: Number | None = None) -> EdgeSubset:
    """Trace of the open ball on every edge, plus the vertices it contains."""
    if isinstance(b, PointRef):
        b = BallSpec(b, r)
    if g.metric == AMBIENT:
        trace = _ambient_trace(g, b.center, b.radius)
        cx, cy = g.coords(b.center)
        verts = []
        for v in g.vertices:
            if (v.x - cx) ** 2 + (v.y - cy) ** 2 < b.radius**2:
                verts.append(v.id)
    else:
        trace = _geodesic_trace(g, b.center, b.radius)
        dist = g.vertex_distances(b.center)
        verts = [vid for vid, d in dist.items() if d < b.radius]
    return EdgeSubset.build(trace, verts)


def ball_measure(g: MetricGraph, center: PointRef, r: Number) -> Number:
    """H^1 of the open ball; exact for rational data, float64 when coordinates are floats."""
    if g.metric == AMBIENT:
        if _has_float_coords(g):
            return _ambient_measure_fast(g, center, r)
        return h1_of_subset(g, ball_subset(g, center, r))
    return _geodesic_measure(g, center, r)


def ball_measure_float(g: MetricGraph, center: PointRef, r: Number) -> float:
    """float64 ball measure, vectorized over edges, for large sample grids."""
    if g.metric == AMBIENT:
        return _ambient_measure_fast(g, center, r)
    ends = _end_index(g)
    length = ends[4]
    dist = g.vertex_distances(center)
    cache = g.__dict__.setdefault("_float_dist", {})
    if center not in cache:
        if len(cache) > 4096:
            cache.clear()
        order = ends[2]
        cache[center] = np.array([float(dist[vid]) for vid in order])
    d = cache[center]
    r = float(r)
    a = np.maximum(r - d[ends[0]], 0.0)
    b = np.maximum(r - d[ends[1]], 0.0)
    span = np.minimum(a + b, length)
    if center.edge is not None:
        i = ends[3][center.edge]
        e = g.edge(center.edge)
        ivs = _geodesic_trace_edge(e, dist, center, r)
        span[i] = sum(float(hi) - float(lo) for lo, hi in _merge([(float(lo), float(hi)) for lo, hi in ivs]))
    return float(math.fsum(span))


def _end_index(g: MetricGraph):
    cache = g.__dict__.setdefault("_end_index", {})
    if "ends" not in cache:
        order = [v.id for v in g.vertices]
        pos = {vid: i for i, vid in enumerate(order)}
        us = np.array([pos[e.u] for e in g.edges])
        vs = np.array([pos[e.v] for e in g.edges])
        length = np.array([float(e.length) for e in g.edges])
        cache["ends"] = (us, vs, order, {e.id: i for i, e in enumerate(g.edges)}, length)
    return cache["ends"]


def _geodesic_measure(g: MetricGraph, center: PointRef, r: Number) -> Number:
    dist = g.vertex_distances(center)
    total: Number = Fraction(0)
    for e in g.edges:
        if center.edge == e.id:
            ivs = _geodesic_trace_edge(e, dist, center, r)
            total += sum((b - a for a, b in _merge(ivs)), Fraction(0))
            continue
        a = r - dist[e.u]
        b = r - dist[e.v]
        if a > 0 and b > 0:
            total += min(e.length, a + b)
        elif a > 0:
            total += min(e.length, a)
        elif b > 0:
            total += min(e.length, b)
    return total


def _geodesic_trace_edge(e, dist, center, r) -> list[Interval]:
    zero = _zero(e.length)
    ivs = [(max(zero, center.t - r), min(e.length, center.t + r))]
    if r > dist[e.u]:
        ivs.append((zero, min(e.length, r - dist[e.u])))
    if r > dist[e.v]:
        ivs.append((max(zero, e.length - (r - dist[e.v])), e.length))
    return ivs


def _merge(ivs: list[Interval]) -> list[Interval]:
    out: list[list[Number]] = []
    for a, b in sorted(ivs):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _has_float_coords(g: MetricGraph) -> bool:
    cache = g.__dict__.setdefault("_float_coords", {})
    if "flag" not in cache:
        cache["flag"] = any(isinstance(v.x, float) or isinstance(v.y, float) for v in g.vertices)
    return cache["flag"]


def _segment_arrays(g: MetricGraph):
    cache = g.__dict__.setdefault("_segment_arrays", {})
    if "arrays" not in cache:
        x0 = np.array([float(g.vertex(e.u).x) for e in g.edges])
        y0 = np.array([float(g.vertex(e.u).y) for e in g.edges])
        x1 = np.array([float(g.vertex(e.v).x) for e in g.edges])
        y1 = np.array([float(g.vertex(e.v).y) for e in g.edges])
        length = np.array([float(e.length) for e in g.edges])
        cache["arrays"] = (x0, y0, x1 - x0, y1 - y0, length)
    return cache["arrays"]


def _ambient_measure_fast(g: MetricGraph, center: PointRef, r: Number) -> float:
    x0, y0, dx, dy, length = _segment_arrays(g)
    cx, cy = (float(c) for c in g.coords(center))
    px, py = x0 - cx, y0 - cy
    a = dx * dx + dy * dy
    # closest parameter and squared distance to the carrying line, free of cancellation
    s_c = -(dx * px + dy * py) / a
    h2 = (dx * py - dy * px) ** 2 / a
    room = float(r) ** 2 - h2
    half = np.sqrt(np.maximum(room, 0.0) / a)
    # min(s_c + half, 1) - max(s_c - half, 0), without subtracting nearby numbers
    span = np.minimum(half, 1.0 - s_c) + np.minimum(half, s_c)
    span = np.where(room > 0, np.maximum(span, 0.0), 0.0)
    return float(math.fsum(span * length))


def ball_measure_in(g: MetricGraph, center: PointRef, r: Number, s: EdgeSubset) -> Number:
    """H^1 of the ball intersected with ``s``."""
    return h1_of_subset(g, ball_subset(g, center, r).intersection(s))


@dataclass(frozen=True)
class ContentReport:
    value: Number
    per_point: tuple[tuple[PointRef, Number], ...]
    radii: tuple[Number, ...]
    method: str

    def to_json(self) -> dict:
        from .numeric import to_json_number

        return {
            "value": to_json_number(self.value),
            "per_point": [{"point": p.to_json(), "ratio": to_json_number(v)} for p, v in self.per_point],
            "radii": [to_json_number(r) for r in self.radii],
            "method": self.method,
        }


def point_content(g: MetricGraph, p: PointRef, radii: Sequence[Number], block: int = 3) -> Number:
    """min over the smallest ``block`` radii of H^1(B(p, r)) / r, centred balls."""
    scan = list(radii)[-block:]
    return min(ball_measure(g, p, r) / r for r in scan)


def cover_content(g: MetricGraph, p: PointRef, radii: Sequence[Number], block: int = 2, steps: int = 16) -> Number:
    """Single-ball covering ratio with off-centre balls that still contain ``p``.

    Centres are placed on each germ at distances ``r*k/steps`` (k < steps).  This
    is the brute-force cover search of the covering definition restricted to
    one ball per point, which is optimal once balls around distinct points are
    disjoint.
    """
    best = None
    for r in list(radii)[-block:]:
        for k in range(steps):
            d = r * Fraction(k, steps) if not isinstance(r, float) else r * k / steps
            for c in _centres_near(g, p, d):
                ratio = ball_measure(g, c, r) / r
                if best is None or ratio < best:
                    best = ratio
    return best


def _centres_near(g: MetricGraph, p: PointRef, d: Number) -> list[PointRef]:
    if d == 0:
        return [p]
    out = []
    for eid, direction in g.directions_at(p):
        e = g.edge(eid)
        if p.vertex is not None:
            t = d if direction == "backward" else e.length - d
        else:
            t = p.t + d if direction == "backward" else p.t - d
        if 0 < t < e.length:
            out.append(PointRef(edge=eid, t=t))
    return out


def codim1_content(
    g: MetricGraph,
    pts: Iterable[PointRef],
    radii: Sequence[Number],
    method: str = "centered",
) -> ContentReport:
    """Codimension-one Hausdorff content of a finite point set.

    ``method="centered"`` sums the smallest-block centred ratios; ``"cover"``
    lets each covering ball sit off-centre (see :func:`cover_content`).
    """
    radii = tuple(radii)
    if any(not r > 0 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    pts = sorted(set(pts), key=PointRef.sort_key)
    if method == "centered":
        per = tuple((p, point_content(g, p, radii)) for p in pts)
    elif method == "cover":
        per = tuple((p, cover_content(g, p, radii)) for p in pts)
    else:
        raise ValueError(f"unknown method {method!r}")
    total = sum((v for _, v in per), Fraction(0))
    return ContentReport(total, per, radii, method)


def dyadic_radii(r0: Number, halvings: int) -> tuple[Number, ...]:
    """``r0, r0/2, ..., r0/2^halvings``."""
    return tuple(r0 / 2**i for i in range(halvings + 1))
