"""Generators: the dyadic star of segments, its distinguished set, and random instances."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .graph import (
    AMBIENT,
    GEODESIC,
    Edge,
    EdgeSubset,
    MetricGraph,
    Piece,
    PiecewiseLinearFn,
    Vertex,
)

MAX_DEPTH = 12
ORIGIN = 0


@dataclass(frozen=True)
class StarSpaceSpec:
    depth: int
    metric: str = GEODESIC

    def __post_init__(self) -> None:
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must lie in 1..{MAX_DEPTH}, got {self.depth}")
        if self.metric not in (GEODESIC, AMBIENT):
            raise ValueError(f"unknown metric {self.metric!r}")


def dyadic_valuation(k: int) -> int:
    return (k & -k).bit_length() - 1


def first_level(k: int, depth: int) -> int:
    """Level at which the line at angle k*pi/2^depth first appears."""
    if k == 0:
        return 1
    return depth - dyadic_valuation(k)


def ray_length(level: int) -> Fraction:
    return Fraction(1, 2 ** (2 * level + 1))


def _unit(k: int, depth: int, flip: bool) -> tuple[object, object]:
    # exact directions on the axes, float64 elsewhere
    n = 2**depth
    quarter = n // 2
    if k == 0:
        c, s = Fraction(1), Fraction(0)
    elif k == quarter:
        c, s = Fraction(0), Fraction(1)
    else:
        theta = math.pi * k / n
        c, s = math.cos(theta), math.sin(theta)
    return (-c, -s) if flip else (c, s)


def star_space(spec: StarSpaceSpec | int, metric: str | None = None) -> MetricGraph:
    """Rays through the origin, each line kept once at its longest (first-level) length.

    Line ``k`` (angle ``k*pi/2^J``) gives edges ``2k`` and ``2k+1`` from the origin
    (vertex 0) to tips ``2k+1`` and ``2k+2``.
    """
    if isinstance(spec, int):
        spec = StarSpaceSpec(spec, metric or GEODESIC)
    depth = spec.depth
    vertices = [Vertex(ORIGIN, Fraction(0), Fraction(0))]
    edges = []
    for k in range(2**depth):
        length = ray_length(first_level(k, depth))
        for side in (0, 1):
            c, s = _unit(k, depth, flip=bool(side))
            tip = 2 * k + 1 + side
            vertices.append(Vertex(tip, c * length, s * length))
            edges.append(Edge(2 * k + side, ORIGIN, tip, length))
    return MetricGraph(tuple(vertices), tuple(edges), spec.metric)


def e_lines(depth: int) -> list[int]:
    """Line indices making up E: the line at angle pi/2^j for j = 1..depth."""
    return [2 ** (depth - j) for j in range(1, depth + 1)]


def indicator_E(spec: StarSpaceSpec | int) -> EdgeSubset:
    depth = spec.depth if isinstance(spec, StarSpaceSpec) else spec
    intervals = {}
    verts = {ORIGIN}
    for k in e_lines(depth):
        length = ray_length(first_level(k, depth))
        for side in (0, 1):
            intervals[2 * k + side] = [(Fraction(0), length)]
            verts.add(2 * k + 1 + side)
    return EdgeSubset.build(intervals, verts)


def star_h1_closed_form(depth: int) -> Fraction:
    return Fraction(3, 4) - Fraction(1, 2 ** (depth + 1))


def parse_gallery(text: str) -> StarSpaceSpec:
    """Parse ``star:J=3,metric=geodesic``."""
    name, _, rest = text.partition(":")
    if name != "star":
        raise ValueError(f"unknown gallery space {name!r}")
    opts = dict(item.split("=", 1) for item in rest.split(",") if item)
    unknown = set(opts) - {"J", "metric"}
    if unknown:
        raise ValueError(f"unknown gallery options {sorted(unknown)}")
    metric = opts.get("metric", GEODESIC)
    if metric == "ambient":
        metric = AMBIENT
    return StarSpaceSpec(int(opts.get("J", 3)), metric)


# ---------------------------------------------------------------------------
# random instances


@dataclass(frozen=True)
class RandomInstance:
    graph: MetricGraph
    fn: PiecewiseLinearFn
    jump_vertices: tuple[int, ...]


def random_instance_detailed(
    seed: int,
    edges: int = 6,
    kind: str = "tree",
    max_pieces: int = 3,
    jumps: bool = True,
    max_degree: int = 4,
    extra_edges: int = 2,
) -> RandomInstance:
    """Random rational metric graph with a random PL function.

    ``kind`` is ``"tree"``, ``"path"`` or ``"graph"`` (a tree plus up to
    ``extra_edges`` chords).  The function is continuous except for jumps
    injected at vertices when ``jumps`` is set.
    """
    rng = random.Random(seed)
    if edges == 1 and kind != "graph":
        g = MetricGraph((Vertex(0), Vertex(1)), (Edge(0, 0, 1, Fraction(1)),))
        a, b = Fraction(rng.randint(-4, 4), 2), Fraction(rng.randint(-4, 4), 2)
        f = PiecewiseLinearFn({0: (Piece(Fraction(0), Fraction(1), a, b),)}, {0: a, 1: b})
        return RandomInstance(g, f, ())

    degree = {0: 0}
    pairs: list[tuple[int, int]] = []
    for vid in range(1, edges + 1):
        if kind == "path":
            parent = vid - 1
        else:
            options = [w for w in degree if degree[w] < max_degree]
            parent = rng.choice(options)
        pairs.append((parent, vid))
        degree[parent] += 1
        degree[vid] = 1
    if kind == "graph":
        for _ in range(extra_edges):
            options = [w for w in degree if degree[w] < max_degree]
            if len(options) < 2:
                break
            a, b = rng.sample(options, 2)
            pairs.append((a, b))
            degree[a] += 1
            degree[b] += 1

    vertices = tuple(Vertex(v) for v in sorted(degree))
    edge_list = tuple(Edge(i, u, v, Fraction(rng.randint(1, 16), 4)) for i, (u, v) in enumerate(pairs))
    g = MetricGraph(vertices, edge_list)

    def draw() -> Fraction:
        return Fraction(rng.randint(-6, 6), 2)

    vvals = {v.id: draw() for v in vertices}
    jump_at = set()
    if jumps:
        for v in vertices:
            if rng.random() < 0.3:
                jump_at.add(v.id)

    pieces = {}
    injected = set()
    for e in edge_list:
        ends = []
        for vid in (e.u, e.v):
            val = vvals[vid]
            if vid in jump_at and rng.random() < 0.6:
                shifted = draw()
                if shifted != val:
                    val = shifted
                    injected.add(vid)
            ends.append(val)
        n = rng.randint(1, max_pieces)
        cuts = sorted({e.length * Fraction(rng.randint(1, 15), 16) for _ in range(n - 1)})
        knots = [Fraction(0)] + cuts + [e.length]
        values = [ends[0]] + [draw() for _ in cuts] + [ends[1]]
        pieces[e.id] = tuple(
            Piece(knots[i], knots[i + 1], values[i], values[i + 1]) for i in range(len(knots) - 1)
        )
    f = PiecewiseLinearFn(pieces, vvals)
    return RandomInstance(g, f, tuple(sorted(injected)))


def random_instance(seed: int, edges: int = 6, **kwargs) -> tuple[MetricGraph, PiecewiseLinearFn]:
    inst = random_instance_detailed(seed, edges, **kwargs)
    return inst.graph, inst.fn


def random_function(g: MetricGraph, seed: int, continuous: bool = True, max_pieces: int = 3) -> PiecewiseLinearFn:
    """Random PL function with rational values in [-1, 1]; jumps at vertices unless ``continuous``."""
    rng = random.Random(seed)

    def draw() -> Fraction:
        return Fraction(rng.randint(-16, 16), 16)

    vvals = {v.id: draw() for v in g.vertices}
    pieces = {}
    for e in g.edges:
        ends = [vvals[e.u], vvals[e.v]]
        if not continuous:
            ends = [v if rng.random() < 0.7 else draw() for v in ends]
        n = rng.randint(1, max_pieces)
        cuts = sorted({e.length * Fraction(rng.randint(1, 15), 16) for _ in range(n - 1)})
        knots = [Fraction(0)] + cuts + [e.length]
        values = [ends[0]] + [draw() for _ in cuts] + [ends[1]]
        pieces[e.id] = tuple(Piece(knots[i], knots[i + 1], values[i], values[i + 1]) for i in range(len(knots) - 1))
    return PiecewiseLinearFn(pieces, vvals)


def star_doubling_grid(depth: int, seed: int = 0, per_level: int = 2) -> tuple[list, list[Fraction]]:
    """Centres and radii for doubling scans on the star.

    Centres: the origin, ``per_level`` seeded points on a ray of each level, and
    for every radius a point on edge 0 at distance ``1.5 r`` from the origin,
    which puts the origin inside ``B(x, 2r)`` but outside ``B(x, r)``.
    Radii: ``2^-3, ..., 2^-3J``.
    """
    from .graph import PointRef

    rng = random.Random(seed)
    radii = [Fraction(1, 2**m) for m in range(3, 3 * depth + 1)]
    centres = [PointRef(vertex=ORIGIN)]
    for level in range(1, depth + 1):
        lines = [k for k in range(2**depth) if first_level(k, depth) == level]
        for _ in range(per_level):
            k = rng.choice(lines)
            eid = 2 * k + rng.randint(0, 1)
            centres.append(PointRef(edge=eid, t=ray_length(level) * Fraction(rng.randint(1, 15), 16)))
    for r in radii:
        d = 3 * r / 2
        if d < ray_length(1):
            centres.append(PointRef(edge=0, t=d))
    return centres, radii
