"""Independent reference computations used only by the test-suite."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import networkx as nx

from bvgraph.graph import MetricGraph, PiecewiseLinearFn, PointRef
from bvgraph.variation import IV, ArcGadget


def _scale(values) -> int:
    den = 1
    for v in values:
        den = den * Fraction(v).denominator // math.gcd(den, Fraction(v).denominator)
    return den


def flow_value(gad: ArcGadget, mode: str) -> Fraction:
    """pV or iV as a min-cost circulation on the node-split gadget.

    Orienting every arc makes its value ``v(head) - v(tail)``; with unit node
    capacities the flow decomposes into node-disjoint oriented paths.
    """
    den = _scale(n.value for n in gad.nodes)
    big = 4 * len(gad.nodes) + 4
    h = nx.DiGraph()
    h.add_node("S", demand=0)
    h.add_node("T", demand=0)
    for n in gad.nodes:
        shared = mode == IV and n.is_point
        h.add_edge(("in", n.id), ("out", n.id), capacity=big if shared else 1, weight=0)
        if not shared:
            val = int(n.value * den)
            h.add_edge("S", ("in", n.id), capacity=1, weight=val)
            h.add_edge(("out", n.id), "T", capacity=1, weight=-val)
    for x, y in gad.edges():
        h.add_edge(("out", x), ("in", y), capacity=1, weight=0)
        h.add_edge(("out", y), ("in", x), capacity=1, weight=0)
    h.add_edge("T", "S", capacity=big, weight=0)
    cost, _ = nx.network_simplex(h)
    return Fraction(-cost, den)


def sampled_graph(g: MetricGraph, f: PiecewiseLinearFn, eps=Fraction(1, 10**6), inner=None):
    """Subdivide each elementary segment at ``eps`` and ``2 eps`` from both ends and at ``inner`` fractions.

    Two samples near each end let one arc stop just short of an endpoint while
    another runs from the endpoint's own value to the adjacent limit.
    """
    if inner is None:
        inner = (2 * eps, Fraction(1, 2), 1 - 2 * eps)
    nodes: dict = {}
    adj: dict = {}

    def node(key, value):
        if key not in nodes:
            nodes[key] = value
            adj[key] = set()
        return key

    for e in g.edges:
        ts = f.critical_offsets(g, e.id)
        prev = node(g.point(e.id, ts[0]), f.value(g, g.point(e.id, ts[0])))
        for t0, t1 in zip(ts, ts[1:]):
            span = t1 - t0
            rel = sorted({eps, 1 - eps, *inner})
            for s in rel:
                t = t0 + span * s
                idx = f.piece_index(e.id, t, "backward")
                cur = node(("s", e.id, t), f.pieces[e.id][idx].at(t))
                adj[prev].add(cur)
                adj[cur].add(prev)
                prev = cur
            end = node(g.point(e.id, t1), f.value(g, g.point(e.id, t1)))
            adj[prev].add(end)
            adj[end].add(prev)
            prev = end
    return nodes, adj


def disjoint_arc_search(nodes: dict, adj: dict, shared: frozenset = frozenset(), order=repr) -> Fraction:
    """Exhaustive maximum of sum |v(end) - v(start)| over node-disjoint simple paths.

    Nodes in ``shared`` may be crossed by several paths but never end one.
    ``order`` fixes the branching order; grouping nearby nodes keeps the memo small.
    """
    keys = sorted(nodes, key=order)
    idx = {k: i for i, k in enumerate(keys)}
    vals = [nodes[k] for k in keys]
    nbrs = [sorted(idx[y] for y in adj[k]) for k in keys]
    common = frozenset(idx[k] for k in shared)

    def paths_from(x, free):
        out = []
        stack = [(x, (x,))]
        while stack:
            cur, path = stack.pop()
            if cur not in common:
                out.append(path)
            for y in nbrs[cur]:
                if (y in free or y in common) and y not in path:
                    stack.append((y, path + (y,)))
        return out

    @lru_cache(maxsize=None)
    def best(free: frozenset):
        if not free:
            return Fraction(0)
        x = min(free)
        rest = free - {x}
        result = best(rest)
        halves = paths_from(x, rest)
        for i, p in enumerate(halves):
            for q in halves[i:]:
                if set(p[1:]) & set(q[1:]):
                    continue
                gain = abs(vals[p[-1]] - vals[q[-1]])
                if gain == 0:
                    continue
                result = max(result, gain + best(free - set(p) - set(q)))
        return result

    return best(frozenset(range(len(keys))) - common)
