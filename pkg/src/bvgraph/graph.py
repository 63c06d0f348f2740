"""Finite metric graphs, points on them, piecewise-linear functions and edge subsets.

Every edge ``e = (u, v, L)`` carries a coordinate ``t`` in ``[0, L]`` running
from ``u`` (``t = 0``) to ``v`` (``t = L``).  A point is addressed either by a
vertex id or by an edge id with a strictly interior offset; :meth:`MetricGraph.point`
canonicalizes offsets that land on an endpoint.

One-sided limits are addressed by an incident edge and a travel direction:
``"forward"`` approaches the point with ``t`` increasing (the limit from the
left), ``"backward"`` with ``t`` decreasing (the limit from the right).
"""

from __future__ import annotations

import bisect
import heapq
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .numeric import Number, close, parse_number, sqrt, to_json_number

GEODESIC = "geodesic"
AMBIENT = "ambient_euclidean"
METRICS = (GEODESIC, AMBIENT)

FORWARD = "forward"
BACKWARD = "backward"
DIRECTIONS = (BACKWARD, FORWARD)


class InputError(ValueError):
    """Malformed input file or object; ``where`` locates the offending entry."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass(frozen=True)
class Vertex:
    id: int
    x: Optional[Number] = None
    y: Optional[Number] = None

    @property
    def has_coords(self) -> bool:
        return self.x is not None and self.y is not None


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    length: Number


@dataclass(frozen=True, order=True)
class PointRef:
    """A point of the graph: ``PointRef(vertex=3)`` or ``PointRef(edge=2, t=Fraction(1, 2))``."""

    vertex: Optional[int] = None
    edge: Optional[int] = None
    t: Optional[Number] = None

    def __post_init__(self) -> None:
        if (self.vertex is None) == (self.edge is None):
            raise ValueError("a point is either a vertex or an edge offset")
        if self.edge is not None and self.t is None:
            raise ValueError("edge points need an offset")

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> tuple:
        if self.vertex is not None:
            return (0, self.vertex, 0)
        return (1, self.edge, self.t)

    def to_json(self) -> dict:
        if self.vertex is not None:
            return {"vertex": self.vertex}
        return {"edge": self.edge, "t": to_json_number(self.t)}

    @classmethod
    def from_json(cls, data: Mapping) -> "PointRef":
        if "vertex" in data:
            return cls(vertex=int(data["vertex"]))
        return cls(edge=int(data["edge"]), t=parse_number(data["t"]))

    def __str__(self) -> str:
        if self.vertex is not None:
            return f"v{self.vertex}"
        return f"e{self.edge}@{self.t}"


def parse_point(text: str) -> PointRef:
    """Parse ``v:3`` or ``e:2:1/2`` (command-line point syntax)."""
    parts = text.split(":")
    if parts[0] == "v" and len(parts) == 2:
        return PointRef(vertex=int(parts[1]))
    if parts[0] == "e" and len(parts) == 3:
        return PointRef(edge=int(parts[1]), t=parse_number(parts[2]))
    raise InputError(f"bad point syntax {text!r} (use v:<id> or e:<id>:<t>)")


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    metric: str = GEODESIC

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric mode {self.metric!r}")

    # -- lookup -----------------------------------------------------------

    @cached_property
    def _vertex_map(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _edge_map(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self) -> dict[int, list[tuple[int, str]]]:
        inc: dict[int, list[tuple[int, str]]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            inc.setdefault(e.u, []).append((e.id, BACKWARD))
            inc.setdefault(e.v, []).append((e.id, FORWARD))
        for lst in inc.values():
            lst.sort()
        return inc

    def vertex(self, vid: int) -> Vertex:
        return self._vertex_map[vid]

    def edge(self, eid: int) -> Edge:
        return self._edge_map[eid]

    def has_vertex(self, vid: int) -> bool:
        return vid in self._vertex_map

    def has_edge(self, eid: int) -> bool:
        return eid in self._edge_map

    def incident(self, vid: int) -> list[tuple[int, str]]:
        """Incident (edge id, approach direction) pairs, sorted; loops appear twice."""
        return self._incidence.get(vid, [])

    def degree(self, vid: int) -> int:
        return len(self.incident(vid))

    def max_degree(self) -> int:
        return max((self.degree(v.id) for v in self.vertices), default=0)

    def point(self, edge: int, t: Number) -> PointRef:
        """Canonical point at offset ``t`` of ``edge`` (vertex form at the ends)."""
        e = self.edge(edge)
        if t == 0:
            return PointRef(vertex=e.u)
        if t == e.length:
            return PointRef(vertex=e.v)
        if not 0 < t < e.length:
            raise ValueError(f"offset {t} outside edge {edge} of length {e.length}")
        return PointRef(edge=edge, t=t)

    def directions_at(self, p: PointRef) -> list[tuple[int, str]]:
        """All (edge, direction) germs through which ``p`` can be approached."""
        if p.vertex is not None:
            return list(self.incident(p.vertex))
        return [(p.edge, BACKWARD), (p.edge, FORWARD)]

    def point_degree(self, p: PointRef) -> int:
        return len(self.directions_at(p))

    def check_point(self, p: PointRef) -> None:
        if p.vertex is not None:
            if not self.has_vertex(p.vertex):
                raise ValueError(f"unknown vertex {p.vertex}")
            return
        if not self.has_edge(p.edge):
            raise ValueError(f"unknown edge {p.edge}")
        if not 0 < p.t < self.edge(p.edge).length:
            raise ValueError(f"offset of {p} is not strictly interior")

    @property
    def total_length(self) -> Number:
        return sum((e.length for e in self.edges), Fraction(0))

    @cached_property
    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertices) - 1 and _connected(self)

    def with_metric(self, metric: str) -> "MetricGraph":
        return MetricGraph(self.vertices, self.edges, metric)

    # -- geometry ---------------------------------------------------------

    def coords(self, p: PointRef) -> tuple[Number, Number]:
        if p.vertex is not None:
            v = self.vertex(p.vertex)
            if not v.has_coords:
                raise ValueError(f"vertex {v.id} has no coordinates")
            return v.x, v.y
        e = self.edge(p.edge)
        (x0, y0), (x1, y1) = self.coords(PointRef(vertex=e.u)), self.coords(PointRef(vertex=e.v))
        s = p.t / e.length
        return x0 + s * (x1 - x0), y0 + s * (y1 - y0)

    def vertex_distances(self, p: PointRef) -> dict[int, Number]:
        """Geodesic distance from ``p`` to every vertex (Dijkstra, cached)."""
        cache = self.__dict__.setdefault("_dijkstra_cache", {})
        if p in cache:
            return cache[p]
        dist: dict[int, Number] = {}
        heap: list[tuple[Number, int]] = []
        if p.vertex is not None:
            heap.append((Fraction(0), p.vertex))
        else:
            e = self.edge(p.edge)
            heap.append((p.t, e.u))
            heap.append((e.length - p.t, e.v))
            heapq.heapify(heap)
        while heap:
            d, vid = heapq.heappop(heap)
            if vid in dist:
                continue
            dist[vid] = d
            for eid, _ in self.incident(vid):
                e = self.edge(eid)
                other = e.v if e.u == vid else e.u
                if other not in dist:
                    heapq.heappush(heap, (d + e.length, other))
        if len(cache) > 4096:
            cache.clear()
        cache[p] = dist
        return dist


def _connected(g: MetricGraph) -> bool:
    if not g.vertices:
        return True
    start = g.vertices[0].id
    seen = {start}
    queue = deque([start])
    while queue:
        vid = queue.popleft()
        for eid, _ in g.incident(vid):
            e = g.edge(eid)
            for w in (e.u, e.v):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return len(seen) == len(g.vertices)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    error: str = ""
    detail: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "error": self.error, "detail": self.detail}


def validate_graph(g: MetricGraph) -> ValidationReport:
    """Check the structural invariants; report the first violation."""
    ids = [v.id for v in g.vertices]
    if len(set(ids)) != len(ids):
        return ValidationReport(False, "duplicate vertex id")
    eids = [e.id for e in g.edges]
    if len(set(eids)) != len(eids):
        return ValidationReport(False, "duplicate edge id")
    if not g.vertices:
        return ValidationReport(False, "empty graph")
    for e in g.edges:
        if not g.has_vertex(e.u) or not g.has_vertex(e.v):
            return ValidationReport(False, "unknown endpoint", f"edge {e.id}")
        if not e.length > 0:
            return ValidationReport(False, "nonpositive length", f"edge {e.id}")
        if isinstance(e.length, float) and not math.isfinite(e.length):
            return ValidationReport(False, "nonpositive length", f"edge {e.id} is not finite")
    if not _connected(g):
        return ValidationReport(False, "disconnected")
    if g.metric == AMBIENT:
        for v in g.vertices:
            if not v.has_coords:
                return ValidationReport(False, "missing coordinates", f"vertex {v.id}")
        for e in g.edges:
            if e.u == e.v:
                return ValidationReport(False, "loop edge in ambient mode", f"edge {e.id}")
            (x0, y0), (x1, y1) = g.coords(PointRef(vertex=e.u)), g.coords(PointRef(vertex=e.v))
            euclid = math.hypot(float(x1 - x0), float(y1 - y0))
            if abs(euclid - float(e.length)) > 1e-9 * max(1.0, euclid):
                return ValidationReport(
                    False, "length mismatch",
                    f"edge {e.id}: declared {e.length}, Euclidean {euclid}",
                )
        clash = _collinear_overlap(g)
        if clash is not None:
            return ValidationReport(False, "overlapping collinear edges", f"edges {clash[0]} and {clash[1]}")
    return ValidationReport(True)


def _collinear_overlap(g: MetricGraph) -> Optional[tuple[int, int]]:
    # bucket edges by their supporting line, then sweep each bucket
    buckets: dict[tuple[float, float, float], list[tuple[float, float, int]]] = {}
    for e in g.edges:
        (x0, y0), (x1, y1) = g.coords(PointRef(vertex=e.u)), g.coords(PointRef(vertex=e.v))
        x0, y0, x1, y1 = float(x0), float(y0), float(x1), float(y1)
        dx, dy = x1 - x0, y1 - y0
        n = math.hypot(dx, dy)
        dx, dy = dx / n, dy / n
        if dx < -1e-12 or (abs(dx) <= 1e-12 and dy < 0):
            dx, dy = -dx, -dy
        offset = -dy * x0 + dx * y0
        key = (round(dx, 9) + 0.0, round(dy, 9) + 0.0, round(offset, 9) + 0.0)
        a, b = dx * x0 + dy * y0, dx * x1 + dy * y1
        buckets.setdefault(key, []).append((min(a, b), max(a, b), e.id))
    for items in buckets.values():
        items.sort()
        reach, owner = -math.inf, None
        for lo, hi, eid in items:
            if owner is not None and lo < reach - 1e-12 * max(1.0, abs(reach)):
                return (owner, eid)
            if hi > reach:
                reach, owner = hi, eid
    return None


def distance(g: MetricGraph, a: PointRef, b: PointRef) -> Number:
    """Distance between two points under the graph's metric mode."""
    if g.metric == AMBIENT:
        (xa, ya), (xb, yb) = g.coords(a), g.coords(b)
        return sqrt((xa - xb) ** 2 + (ya - yb) ** 2)
    return geodesic_distance(g, a, b)


def geodesic_distance(g: MetricGraph, a: PointRef, b: PointRef) -> Number:
    dist = g.vertex_distances(a)
    if b.vertex is not None:
        if b.vertex not in dist:
            raise RuntimeError(f"{b} unreachable from {a}")
        return dist[b.vertex]
    e = g.edge(b.edge)
    best = min(dist[e.u] + b.t, dist[e.v] + e.length - b.t)
    if a.edge is not None and a.edge == b.edge:
        best = min(best, abs(a.t - b.t))
    return best


# ---------------------------------------------------------------------------
# piecewise-linear functions


@dataclass(frozen=True)
class Piece:
    t0: Number
    t1: Number
    v0: Number
    v1: Number

    def at(self, t: Number) -> Number:
        if t == self.t0:
            return self.v0
        if t == self.t1:
            return self.v1
        return self.v0 + (self.v1 - self.v0) * (t - self.t0) / (self.t1 - self.t0)

    @property
    def slope(self) -> Number:
        return (self.v1 - self.v0) / (self.t1 - self.t0)


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """A function on a metric graph, linear on finitely many pieces per edge.

    ``overrides`` holds explicit values at interior edge points; vertex values
    live in ``vertex_values``.  Elsewhere the point value is the right-hand
    piece's start value (at a vertex without a stored value: the limit along
    the smallest incident germ).
    """

    pieces: Mapping[int, tuple[Piece, ...]]
    vertex_values: Mapping[int, Number] = field(default_factory=dict)
    overrides: Mapping[tuple[int, Number], Number] = field(default_factory=dict)

    @cached_property
    def _starts(self) -> dict[int, list[Number]]:
        return {eid: [p.t0 for p in ps] for eid, ps in self.pieces.items()}

    def piece_index(self, edge: int, t: Number, side: str) -> int:
        """Index of the piece holding ``t``; at a breakpoint ``side`` picks left/right."""
        starts = self._starts[edge]
        if side == FORWARD:
            return max(bisect.bisect_left(starts, t) - 1, 0)
        return max(bisect.bisect_right(starts, t) - 1, 0)

    def limit(self, edge: int, t: Number, direction: str) -> Number:
        """One-sided limit at offset ``t`` of ``edge`` travelling in ``direction``."""
        ps = self.pieces[edge]
        return ps[self.piece_index(edge, t, direction)].at(t)

    def breakpoints(self, edge: int) -> list[Number]:
        ps = self.pieces[edge]
        return [p.t0 for p in ps[1:]]

    def critical_offsets(self, g: MetricGraph, edge: int) -> list[Number]:
        """Sorted offsets of the critical points on ``edge`` (ends included)."""
        pts = {Fraction(0) if not isinstance(g.edge(edge).length, float) else 0.0, g.edge(edge).length}
        pts.update(self.breakpoints(edge))
        pts.update(t for (eid, t) in self.overrides if eid == edge)
        return sorted(pts)

    def value(self, g: MetricGraph, p: PointRef) -> Number:
        """Point value (override, then vertex value, then right-piece default)."""
        if p.vertex is not None:
            if p.vertex in self.vertex_values:
                return self.vertex_values[p.vertex]
            eid, direction = g.incident(p.vertex)[0]
            e = g.edge(eid)
            return self.limit(eid, Fraction(0) if direction == BACKWARD else e.length, direction)
        key = (p.edge, p.t)
        if key in self.overrides:
            return self.overrides[key]
        return self.limit(p.edge, p.t, BACKWARD)

    def limit_at(self, g: MetricGraph, p: PointRef, edge: int, direction: Optional[str] = None) -> Number:
        """Limit at ``p`` approached inside ``edge``; ``direction`` may be inferred."""
        germs = g.directions_at(p)
        options = [d for (eid, d) in germs if eid == edge]
        if not options:
            raise ValueError(f"edge {edge} is not incident to {p}")
        if direction is None:
            if len(set(options)) > 1:
                raise ValueError(f"direction needed to approach {p} along edge {edge}")
            direction = options[0]
        elif direction not in options:
            raise ValueError(f"{p} cannot be approached {direction} along edge {edge}")
        if p.vertex is not None:
            e = g.edge(edge)
            t = Fraction(0) if direction == BACKWARD else e.length
            if isinstance(e.length, float) and direction == BACKWARD:
                t = 0.0
            return self.limit(edge, t, direction)
        return self.limit(edge, p.t, direction)

    def limits(self, g: MetricGraph, p: PointRef) -> list[tuple[tuple[int, str], Number]]:
        return [((eid, d), self.limit_at(g, p, eid, d)) for (eid, d) in g.directions_at(p)]

    def eval(self, g: MetricGraph, p: PointRef, side: Optional[tuple[int, Optional[str]]] = None) -> Number:
        """``side=None`` gives the point value; ``side=(edge, direction)`` a one-sided limit."""
        if side is None:
            return self.value(g, p)
        return self.limit_at(g, p, side[0], side[1])

    def critical_points(self, g: MetricGraph) -> list[PointRef]:
        pts = {PointRef(vertex=v.id) for v in g.vertices}
        for e in g.edges:
            for t in self.critical_offsets(g, e.id):
                if 0 < t < e.length:
                    pts.add(PointRef(edge=e.id, t=t))
        return sorted(pts, key=PointRef.sort_key)

    def is_continuous_at(self, g: MetricGraph, p: PointRef) -> bool:
        vals = [v for _, v in self.limits(g, p)] + [self.value(g, p)]
        return all(close(vals[0], v) for v in vals[1:])

    def is_curve_continuous(self, g: MetricGraph) -> bool:
        for e in g.edges:
            ps = self.pieces[e.id]
            if any(not close(a.v1, b.v0) for a, b in zip(ps, ps[1:])):
                return False
            for (eid, t), val in self.overrides.items():
                if eid == e.id and not close(val, self.limit(eid, t, BACKWARD)):
                    return False
        for v in g.vertices:
            here = self.value(g, PointRef(vertex=v.id))
            for eid, direction in g.incident(v.id):
                ps = self.pieces[eid]
                end = ps[0].v0 if direction == BACKWARD else ps[-1].v1
                if not close(here, end):
                    return False
        return True

    def value_range(self) -> tuple[Number, Number]:
        vals = [x for ps in self.pieces.values() for p in ps for x in (p.v0, p.v1)]
        vals += list(self.vertex_values.values()) + list(self.overrides.values())
        return min(vals), max(vals)

    def critical_values(self, g: MetricGraph) -> list[Number]:
        vals = {x for ps in self.pieces.values() for p in ps for x in (p.v0, p.v1)}
        vals.update(self.value(g, p) for p in self.critical_points(g))
        return sorted(vals)

    def map_values(self, fn) -> "PiecewiseLinearFn":
        """Apply ``fn`` to every stored value (valid for affine ``fn`` only)."""
        return PiecewiseLinearFn(
            {eid: tuple(Piece(p.t0, p.t1, fn(p.v0), fn(p.v1)) for p in ps) for eid, ps in self.pieces.items()},
            {k: fn(v) for k, v in self.vertex_values.items()},
            {k: fn(v) for k, v in self.overrides.items()},
        )

    def integral(self, edge: int) -> Number:
        return sum(((p.v0 + p.v1) * (p.t1 - p.t0) / 2 for p in self.pieces[edge]), Fraction(0))


def validate_function(g: MetricGraph, f: PiecewiseLinearFn) -> None:
    """Raise :class:`InputError` unless ``f`` is a well-formed function on ``g``."""
    for e in g.edges:
        ps = f.pieces.get(e.id)
        if not ps:
            raise InputError("missing pieces", f"edge {e.id}")
        if ps[0].t0 != 0 or not close(ps[-1].t1, e.length):
            raise InputError("pieces do not cover the edge", f"edge {e.id}")
        for a, b in zip(ps, ps[1:]):
            if a.t1 != b.t0:
                raise InputError("pieces not contiguous", f"edge {e.id}")
        for p in ps:
            if not p.t0 < p.t1:
                raise InputError("empty or reversed piece", f"edge {e.id}")
    for eid in f.pieces:
        if not g.has_edge(eid):
            raise InputError("pieces on unknown edge", f"edge {eid}")
    for vid in f.vertex_values:
        if not g.has_vertex(vid):
            raise InputError("value on unknown vertex", f"vertex {vid}")
    for (eid, t) in f.overrides:
        if not g.has_edge(eid) or not 0 < t < g.edge(eid).length:
            raise InputError("override must be strictly inside an edge", f"edge {eid}, t={t}")


def linear_function(g: MetricGraph, edge_values: Mapping[int, tuple[Number, Number]]) -> PiecewiseLinearFn:
    """One linear piece per edge with the given end values; vertex values from the ends."""
    pieces = {}
    vvals: dict[int, Number] = {}
    for e in g.edges:
        a, b = edge_values[e.id]
        pieces[e.id] = (Piece(Fraction(0) if not isinstance(e.length, float) else 0.0, e.length, a, b),)
        vvals.setdefault(e.u, a)
        vvals.setdefault(e.v, b)
    return PiecewiseLinearFn(pieces, vvals)


def constant_function(g: MetricGraph, c: Number) -> PiecewiseLinearFn:
    return linear_function(g, {e.id: (c, c) for e in g.edges})


# ---------------------------------------------------------------------------
# edge subsets


Interval = tuple[Number, Number]


def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    items = sorted((a, b) for a, b in intervals if a < b)
    out: list[list[Number]] = []
    for a, b in items:
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class EdgeSubset:
    """Finite union of closed edge intervals plus a set of member vertices.

    Set algebra is carried out up to finitely many interval endpoints, which is
    all that H^1 and density computations see.
    """

    intervals: Mapping[int, tuple[Interval, ...]]
    vertices: frozenset = frozenset()

    @classmethod
    def build(cls, intervals: Mapping[int, Iterable[Interval]], vertices: Iterable[int] = ()) -> "EdgeSubset":
        norm = {eid: _normalize(iv) for eid, iv in intervals.items()}
        return cls({eid: iv for eid, iv in norm.items() if iv}, frozenset(vertices))

    @classmethod
    def full(cls, g: MetricGraph) -> "EdgeSubset":
        zero = lambda e: 0.0 if isinstance(e.length, float) else Fraction(0)  # noqa: E731
        return cls.build({e.id: [(zero(e), e.length)] for e in g.edges}, (v.id for v in g.vertices))

    @classmethod
    def empty(cls) -> "EdgeSubset":
        return cls({}, frozenset())

    def on(self, edge: int) -> tuple[Interval, ...]:
        return self.intervals.get(edge, ())

    def contains(self, g: MetricGraph, p: PointRef) -> bool:
        if p.vertex is not None:
            return p.vertex in self.vertices
        return any(a <= p.t <= b for a, b in self.on(p.edge))

    def complement(self, g: MetricGraph) -> "EdgeSubset":
        out = {}
        for e in g.edges:
            gaps, pos = [], (0.0 if isinstance(e.length, float) else Fraction(0))
            for a, b in self.on(e.id):
                gaps.append((pos, a))
                pos = b
            gaps.append((pos, e.length))
            out[e.id] = gaps
        return EdgeSubset.build(out, (v.id for v in g.vertices if v.id not in self.vertices))

    def union(self, other: "EdgeSubset") -> "EdgeSubset":
        keys = set(self.intervals) | set(other.intervals)
        return EdgeSubset.build({k: list(self.on(k)) + list(other.on(k)) for k in keys}, self.vertices | other.vertices)

    def intersection(self, other: "EdgeSubset") -> "EdgeSubset":
        out = {}
        for k in set(self.intervals) & set(other.intervals):
            pieces = []
            for a, b in self.on(k):
                for c, d in other.on(k):
                    lo, hi = max(a, c), min(b, d)
                    if lo < hi:
                        pieces.append((lo, hi))
            out[k] = pieces
        return EdgeSubset.build(out, self.vertices & other.vertices)

    def validate(self, g: MetricGraph) -> None:
        for eid, ivs in self.intervals.items():
            if not g.has_edge(eid):
                raise InputError("intervals on unknown edge", f"edge {eid}")
            for a, b in ivs:
                if not 0 <= a < b <= g.edge(eid).length:
                    raise InputError("interval outside edge", f"edge {eid}")
        for vid in self.vertices:
            if not g.has_vertex(vid):
                raise InputError("unknown vertex", f"vertex {vid}")


def indicator_function(g: MetricGraph, s: EdgeSubset) -> PiecewiseLinearFn:
    """The 0/1 function of ``s`` with point values given by membership."""
    one, zero = Fraction(1), Fraction(0)
    pieces: dict[int, tuple[Piece, ...]] = {}
    overrides: dict[tuple[int, Number], Number] = {}
    for e in g.edges:
        cuts = [Fraction(0) if not isinstance(e.length, float) else 0.0]
        for a, b in s.on(e.id):
            cuts += [a, b]
        cuts.append(e.length)
        cuts = sorted(set(cuts))
        ps = []
        for lo, hi in zip(cuts, cuts[1:]):
            mid = (lo + hi) / 2
            val = one if any(a <= mid <= b for a, b in s.on(e.id)) else zero
            ps.append(Piece(lo, hi, val, val))
        pieces[e.id] = tuple(ps)
        for t in cuts[1:-1]:
            member = one if any(a <= t <= b for a, b in s.on(e.id)) else zero
            right = ps[bisect.bisect_right([p.t0 for p in ps], t) - 1].v0
            if member != right:
                overrides[(e.id, t)] = member
    vvals = {v.id: (one if v.id in s.vertices else zero) for v in g.vertices}
    return PiecewiseLinearFn(pieces, vvals, overrides)


# ---------------------------------------------------------------------------
# JSON formats


def _num(data: Mapping, key: str, where: str) -> Number:
    if key not in data:
        raise InputError(f"missing field {key!r}", where)
    try:
        return parse_number(data[key])
    except ValueError as exc:
        raise InputError(str(exc), f"{where}.{key}") from exc


def _int(data: Mapping, key: str, where: str) -> int:
    if key not in data:
        raise InputError(f"missing field {key!r}", where)
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError("expected an integer", f"{where}.{key}")
    return value


def _load_json(text: str, what: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}", f"{what} line {exc.lineno} column {exc.colno}") from exc


def space_from_json(data: object) -> MetricGraph:
    if not isinstance(data, dict):
        raise InputError("space file must hold an object")
    metric = data.get("metric", GEODESIC)
    if metric not in METRICS:
        raise InputError(f"unknown metric {metric!r}", "metric")
    vertices = []
    for i, raw in enumerate(data.get("vertices", [])):
        where = f"vertices[{i}]"
        if not isinstance(raw, dict):
            raise InputError("expected an object", where)
        x = _num(raw, "x", where) if "x" in raw else None
        y = _num(raw, "y", where) if "y" in raw else None
        vertices.append(Vertex(_int(raw, "id", where), x, y))
    edges = []
    for i, raw in enumerate(data.get("edges", [])):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise InputError("expected an object", where)
        edges.append(Edge(_int(raw, "id", where), _int(raw, "u", where), _int(raw, "v", where), _num(raw, "length", where)))
    return MetricGraph(tuple(vertices), tuple(edges), metric)


def space_to_json(g: MetricGraph) -> dict:
    verts = []
    for v in g.vertices:
        item = {"id": v.id}
        if v.has_coords:
            item["x"] = to_json_number(v.x)
            item["y"] = to_json_number(v.y)
        verts.append(item)
    return {
        "metric": g.metric,
        "vertices": verts,
        "edges": [{"id": e.id, "u": e.u, "v": e.v, "length": to_json_number(e.length)} for e in g.edges],
    }


def function_from_json(data: object) -> PiecewiseLinearFn:
    if not isinstance(data, dict):
        raise InputError("function file must hold an object")
    pieces: dict[int, tuple[Piece, ...]] = {}
    for i, raw in enumerate(data.get("edges", [])):
        where = f"edges[{i}]"
        eid = _int(raw, "edge", where)
        ps = []
        for j, pr in enumerate(raw.get("pieces", [])):
            pw = f"{where}.pieces[{j}]"
            ps.append(Piece(_num(pr, "t0", pw), _num(pr, "t1", pw), _num(pr, "v0", pw), _num(pr, "v1", pw)))
        pieces[eid] = tuple(ps)
    vvals = {}
    for key, val in data.get("vertex_values", {}).items():
        try:
            vvals[int(key)] = parse_number(val)
        except ValueError as exc:
            raise InputError(str(exc), f"vertex_values.{key}") from exc
    overrides = {}
    for i, raw in enumerate(data.get("overrides", [])):
        where = f"overrides[{i}]"
        overrides[(_int(raw, "edge", where), _num(raw, "t", where))] = _num(raw, "v", where)
    return PiecewiseLinearFn(pieces, vvals, overrides)


def function_to_json(f: PiecewiseLinearFn) -> dict:
    return {
        "edges": [
            {
                "edge": eid,
                "pieces": [
                    {"t0": to_json_number(p.t0), "t1": to_json_number(p.t1), "v0": to_json_number(p.v0), "v1": to_json_number(p.v1)}
                    for p in f.pieces[eid]
                ],
            }
            for eid in sorted(f.pieces)
        ],
        "vertex_values": {str(k): to_json_number(v) for k, v in sorted(f.vertex_values.items())},
        "overrides": [
            {"edge": eid, "t": to_json_number(t), "v": to_json_number(v)} for (eid, t), v in sorted(f.overrides.items())
        ],
    }


def subset_from_json(data: object) -> EdgeSubset:
    if not isinstance(data, dict):
        raise InputError("subset file must hold an object")
    intervals = {}
    for i, raw in enumerate(data.get("edges", [])):
        where = f"edges[{i}]"
        eid = _int(raw, "edge", where)
        ivs = []
        for j, pair in enumerate(raw.get("intervals", [])):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise InputError("interval must be a pair", f"{where}.intervals[{j}]")
            try:
                ivs.append((parse_number(pair[0]), parse_number(pair[1])))
            except ValueError as exc:
                raise InputError(str(exc), f"{where}.intervals[{j}]") from exc
        intervals[eid] = ivs
    verts = data.get("vertices", [])
    return EdgeSubset.build(intervals, (int(v) for v in verts))


def subset_to_json(s: EdgeSubset) -> dict:
    return {
        "edges": [
            {"edge": eid, "intervals": [[to_json_number(a), to_json_number(b)] for a, b in s.intervals[eid]]}
            for eid in sorted(s.intervals)
        ],
        "vertices": sorted(s.vertices),
    }


def load_space(path: str) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return space_from_json(_load_json(fh.read(), path))


def load_function(path: str) -> PiecewiseLinearFn:
    with open(path, encoding="utf-8") as fh:
        return function_from_json(_load_json(fh.read(), path))


def load_subset(path: str) -> EdgeSubset:
    with open(path, encoding="utf-8") as fh:
        return subset_from_json(_load_json(fh.read(), path))


def iter_edge_points(g: MetricGraph, samples: Sequence[Number]) -> Iterator[PointRef]:
    """Points at the given relative positions (in (0, 1)) along every edge."""
    for e in g.edges:
        for s in samples:
            yield g.point(e.id, e.length * s)
