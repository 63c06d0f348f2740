"""Pointwise variation of piecewise-linear functions via a finite disjoint-arc problem.

The supremum over families of pairwise disjoint arcs is reduced to an exact
optimisation on a *gadget graph*:

* one point-node per critical point (vertices, breakpoints, override points),
  valued at the function's point value;
* four sub-nodes per elementary segment ``[t0, t1]``, chained as
  ``P - s0 - s1 - s2 - s3 - Q``; ``s0, s1`` carry the limit ``a`` at ``t0`` from
  inside the segment and ``s2, s3`` the limit ``b`` at ``t1``.

On an elementary segment the function is monotone, so an arc ending inside it
gains most by ending next to one of its ends.  Two slots per end let a stub
entering from ``P`` and a stub entering from ``Q`` end on the same side
(``(a, a)`` or ``(b, b)``), or an extra arc ``s1 - s2`` fit between them.

Arcs are node-disjoint paths.  Orienting each arc turns ``|v(head) - v(tail)|``
into the local sum ``+v(head) - v(tail)``, so both solvers below optimise a sum
of per-node terms:

* ``pV``: every node has capacity one and may be a terminal;
* ``PV``: same capacities, the objective is the sum of gadget edge weights
  along each arc (the one-dimensional variation along the arc);
* ``iV``: point-nodes have unlimited capacity and are never terminals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Optional

from .graph import BACKWARD, FORWARD, MetricGraph, Piece, PiecewiseLinearFn, PointRef
from .functions import clip
from .numeric import Number, close, to_json_number

PV_POINT = "pV"
PV_PATH = "PV"
IV = "iV"
MODES = (PV_POINT, PV_PATH, IV)

_MODE_ALIASES = {"pv": PV_POINT, "pV": PV_POINT, "PV": PV_PATH, "iv": IV, "iV": IV}


def parse_mode(text: str) -> str:
    try:
        return _MODE_ALIASES[text]
    except KeyError:
        raise ValueError(f"unknown mode {text!r} (use pv, PV or iv)") from None


class CapExceeded(RuntimeError):
    """The gadget is larger than the configured solver cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: {size} elementary segments exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


# ---------------------------------------------------------------------------
# gadget


@dataclass(frozen=True)
class GadgetNode:
    id: int
    kind: str  # "point" or "sub"
    value: Number
    point: Optional[PointRef] = None
    segment: Optional[int] = None
    slot: Optional[int] = None

    @property
    def is_point(self) -> bool:
        return self.kind == "point"

    def label(self) -> str:
        if self.is_point:
            return str(self.point)
        return f"s{self.segment}.{self.slot}"


@dataclass(frozen=True)
class Segment:
    id: int
    edge: int
    t0: Number
    t1: Number
    start: int
    end: int
    a: Number
    b: Number
    subs: tuple[int, int, int, int]


@dataclass(frozen=True)
class ArcGadget:
    nodes: tuple[GadgetNode, ...]
    segments: tuple[Segment, ...]
    adjacency: tuple[tuple[int, ...], ...]
    weights: Mapping[tuple[int, int], Number]
    outer: Mapping[int, int]
    is_tree: bool

    @property
    def point_count(self) -> int:
        return sum(1 for n in self.nodes if n.is_point)

    @property
    def segment_count(self) -> int:
        return len(self.segments)

    @property
    def sub_count(self) -> int:
        return 4 * len(self.segments)

    @cached_property
    def point_index(self) -> dict[PointRef, int]:
        return {n.point: n.id for n in self.nodes if n.is_point}

    def weight(self, x: int, y: int) -> Number:
        return self.weights[(x, y) if x < y else (y, x)]

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.weights)


def build_gadget(g: MetricGraph, f: PiecewiseLinearFn) -> ArcGadget:
    nodes: list[GadgetNode] = []
    index: dict[PointRef, int] = {}

    def point_node(p: PointRef) -> int:
        if p not in index:
            index[p] = len(nodes)
            nodes.append(GadgetNode(len(nodes), "point", f.value(g, p), point=p))
        return index[p]

    for v in sorted(g.vertices, key=lambda v: v.id):
        point_node(PointRef(vertex=v.id))
    offsets = {e.id: f.critical_offsets(g, e.id) for e in g.edges}
    for e in sorted(g.edges, key=lambda e: e.id):
        for t in offsets[e.id][1:-1]:
            point_node(PointRef(edge=e.id, t=t))

    adjacency: dict[int, list[int]] = {}
    weights: dict[tuple[int, int], Number] = {}
    outer: dict[int, int] = {}
    segments: list[Segment] = []

    def link(x: int, y: int, w: Number) -> None:
        adjacency.setdefault(x, []).append(y)
        adjacency.setdefault(y, []).append(x)
        weights[(x, y) if x < y else (y, x)] = abs(w)

    for e in sorted(g.edges, key=lambda e: e.id):
        ts = offsets[e.id]
        for t0, t1 in zip(ts, ts[1:]):
            start = point_node(g.point(e.id, t0))
            end = point_node(g.point(e.id, t1))
            a = f.limit(e.id, t0, BACKWARD)
            b = f.limit(e.id, t1, FORWARD)
            sid = len(segments)
            subs = []
            for slot, val in enumerate((a, a, b, b)):
                subs.append(len(nodes))
                nodes.append(GadgetNode(len(nodes), "sub", val, segment=sid, slot=slot))
            s0, s1, s2, s3 = subs
            link(start, s0, nodes[start].value - a)
            link(s0, s1, 0 * a)
            link(s1, s2, b - a)
            link(s2, s3, 0 * b)
            link(s3, end, b - nodes[end].value)
            outer.update({s0: start, s1: s2, s2: s1, s3: end})
            segments.append(Segment(sid, e.id, t0, t1, start, end, a, b, (s0, s1, s2, s3)))

    adj = tuple(tuple(adjacency.get(i, ())) for i in range(len(nodes)))
    return ArcGadget(tuple(nodes), tuple(segments), adj, weights, outer, g.is_tree)


# ---------------------------------------------------------------------------
# arc systems


@dataclass(frozen=True)
class Arc:
    nodes: tuple[int, ...]
    value: Number

    @property
    def tail(self) -> int:
        return self.nodes[0]

    @property
    def head(self) -> int:
        return self.nodes[-1]


@dataclass(frozen=True)
class ArcSystem:
    mode: str
    arcs: tuple[Arc, ...]
    total: Number
    method: str

    def to_json(self, gad: ArcGadget) -> dict:
        def end(nid: int) -> dict:
            n = gad.nodes[nid]
            return {"node": nid, "kind": "point" if n.is_point else "limit", "at": n.label(), "value": to_json_number(n.value)}

        return {
            "mode": self.mode,
            "method": self.method,
            "total": to_json_number(self.total),
            "arcs": [
                {"nodes": list(a.nodes), "start": end(a.tail), "end": end(a.head), "value": to_json_number(a.value)}
                for a in self.arcs
            ],
        }


def _zero_like(gad: ArcGadget) -> Number:
    for n in gad.nodes:
        return 0 * n.value
    return Fraction(0)


class _Rules:
    """Per-mode node capacities, terminal permissions and local objective terms."""

    def __init__(self, gad: ArcGadget, mode: str):
        self.gad = gad
        self.mode = mode
        zero = _zero_like(gad)
        self.zero = zero
        self.term = [zero if mode == PV_PATH else n.value for n in gad.nodes]
        self.shared = [mode == IV and n.is_point for n in gad.nodes]

    def can_end(self, x: int, via: int) -> bool:
        node = self.gad.nodes[x]
        if node.is_point:
            return self.mode != IV
        return self.gad.outer[x] == via

    def edge_gain(self, x: int, y: int) -> Number:
        return self.gad.weight(x, y) if self.mode == PV_PATH else self.zero


def _trace(gad: ArcGadget, rules: _Rules, flows: list[tuple[int, int]], method: str) -> ArcSystem:
    """Turn oriented used edges into arcs; closed loops carry no value and are dropped."""
    out: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    for x, y in sorted(flows):
        out.setdefault(x, []).append(y)
        indeg[y] = indeg.get(y, 0) + 1
    arcs = []
    tails = [x for x in sorted(out) if indeg.get(x, 0) == 0 and not rules.shared[x]]
    for tail in tails:
        path = [tail]
        cur = tail
        while out.get(cur):
            cur = out[cur].pop(0)
            path.append(cur)
            if not rules.shared[cur] and not out.get(cur):
                break
        path = _shortcut(path)
        if len(path) < 2:
            continue
        if rules.mode == PV_PATH:
            value = sum((gad.weight(x, y) for x, y in zip(path, path[1:])), rules.zero)
        else:
            value = gad.nodes[path[-1]].value - gad.nodes[path[0]].value
            if value < 0:
                path.reverse()
                value = -value
        if value != 0:
            arcs.append(Arc(tuple(path), value))
    arcs.sort(key=lambda a: a.nodes)
    total = sum((a.value for a in arcs), rules.zero)
    return ArcSystem(rules.mode, tuple(arcs), total, method)


def _shortcut(path: list[int]) -> list[int]:
    # remove loops through shared point-nodes so every arc is injective
    seen: dict[int, int] = {}
    out: list[int] = []
    for x in path:
        if x in seen:
            del out[seen[x] + 1:]
            seen = {y: i for i, y in enumerate(out)}
        else:
            seen[x] = len(out)
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# tree dynamic programme

# Flow direction on the edge between a node and its parent, seen from the node:
UP = 1     # node -> parent
DOWN = -1  # parent -> node


def _tree_solve(gad: ArcGadget, rules: _Rules, adjacency=None, method: str = "tree-dp") -> ArcSystem:
    adj = adjacency if adjacency is not None else gad.adjacency
    n = len(gad.nodes)
    if n == 0:
        return ArcSystem(rules.mode, (), rules.zero, method)
    neg_inf = None
    parent = [-1] * n
    order = []
    seen = [False] * n
    stack = [0]
    seen[0] = True
    while stack:
        x = stack.pop()
        order.append(x)
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                parent[y] = x
                stack.append(y)
    if len(order) != n:
        raise ValueError("gadget is not connected")

    closed = [rules.zero] * n
    opened: list[dict[int, Optional[Number]]] = [{} for _ in range(n)]
    # choice[x][state] = {child: direction of child's edge seen from the child}
    choice: list[dict[int, dict[int, int]]] = [{} for _ in range(n)]

    for x in reversed(order):
        kids = [c for c in adj[x] if parent[c] == x]
        base = sum((closed[c] for c in kids), rules.zero)
        gains = {}
        for c in kids:
            w = rules.edge_gain(x, c)
            for d in (UP, DOWN):
                o = opened[c].get(d)
                gains[(c, d)] = None if o is None else o + w - closed[c]
        term = rules.term[x]
        par = parent[x]
        if rules.shared[x]:
            _balance_node(x, kids, gains, base, par, closed, opened, choice)
            continue
        # closed: unused, terminal on one child edge, or a pass joining two children
        best, pick = rules.zero, {}
        for c in kids:
            if rules.can_end(x, c):
                g_in = gains[(c, UP)]
                if g_in is not None and g_in + term > best:
                    best, pick = g_in + term, {c: UP}
                g_out = gains[(c, DOWN)]
                if g_out is not None and g_out - term > best:
                    best, pick = g_out - term, {c: DOWN}
        top_in = _top2(kids, gains, UP)
        top_out = _top2(kids, gains, DOWN)
        for gi, ci in top_in:
            for go, co in top_out:
                if ci != co and gi + go > best:
                    best, pick = gi + go, {ci: UP, co: DOWN}
        closed[x] = base + best
        choice[x][0] = pick
        if par < 0:
            continue
        # open upward: x is the tail, or passes flow arriving from a child
        for d in (UP, DOWN):
            sign = -1 if d == UP else 1
            cand, pick = neg_inf, None
            if rules.can_end(x, par):
                cand, pick = sign * term, {}
            need = UP if d == UP else DOWN
            best_child = _top2(kids, gains, need)
            if best_child and (cand is None or best_child[0][0] > cand):
                cand, pick = best_child[0][0], {best_child[0][1]: need}
            opened[x][d] = None if cand is None else base + cand
            if pick is not None:
                choice[x][d] = pick

    # top-down reconstruction of oriented used edges
    state = [0] * n
    flows = []
    for x in order:
        pick = choice[x].get(state[x], {})
        for c in adj[x]:
            if parent[c] != x:
                continue
            if c in pick:
                state[c] = pick[c]
                flows.append((c, x) if pick[c] == UP else (x, c))
            else:
                state[c] = 0
    system = _trace(gad, rules, flows, method)
    if not close(system.total, closed[0]):
        raise AssertionError(f"tree DP reconstruction mismatch: {system.total} vs {closed[0]}")
    return system


def _top2(kids, gains, d):
    items = sorted(((gains[(c, d)], c) for c in kids if gains[(c, d)] is not None), key=lambda t: (-t[0], t[1]))
    return items[:2]


def _balance_node(x, kids, gains, base, par, closed, opened, choice):
    """Unlimited-capacity node: choose in/out children with prescribed imbalance."""
    def best_of(g):
        return max((v for v in g if v is not None), default=None)

    positive = [c for c in kids if (best_of((gains[(c, UP)], gains[(c, DOWN)])) or 0) > 0]
    rest = [c for c in kids if c not in set(positive)]
    q = len(positive)
    keep = set(positive)
    for d in (UP, DOWN):
        ranked = sorted((c for c in rest if gains[(c, d)] is not None), key=lambda c: (-gains[(c, d)], c))
        keep.update(ranked[: 2 * q + 2])
    cand = sorted(keep)
    # dp[balance] = (gain, assignment) with balance = #in - #out among children
    dp: dict[int, tuple[Number, tuple]] = {0: (0 * base, ())}
    for c in cand:
        nxt = dict(dp)
        for bal, (val, asg) in dp.items():
            for d, step in ((UP, 1), (DOWN, -1)):
                g = gains[(c, d)]
                if g is None:
                    continue
                key = bal + step
                v = val + g
                if key not in nxt or v > nxt[key][0]:
                    nxt[key] = (v, asg + ((c, d),))
        dp = nxt
    closed[x] = base + dp[0][0]
    choice[x][0] = dict(dp[0][1])
    if par < 0:
        return
    # flow x -> parent needs one more child flowing in than out
    for d, bal in ((UP, 1), (DOWN, -1)):
        if bal in dp:
            opened[x][d] = base + dp[bal][0]
            choice[x][d] = dict(dp[bal][1])
        else:
            opened[x][d] = None


# ---------------------------------------------------------------------------
# branch and bound over frontier states


def _search_order(gad: ArcGadget) -> list[int]:
    """Greedy vertex order keeping the decided/undecided cut small."""
    n = len(gad.nodes)
    decided = [False] * n
    crossing = [0] * n  # edges from each node into the decided set
    order = []
    candidates = {0}
    while len(order) < n:
        if not candidates:
            candidates = {min(i for i in range(n) if not decided[i])}
        x = min(candidates, key=lambda y: (len(gad.adjacency[y]) - 2 * crossing[y], y))
        candidates.discard(x)
        decided[x] = True
        order.append(x)
        for y in gad.adjacency[x]:
            if not decided[y]:
                crossing[y] += 1
                candidates.add(y)
    return order


class _BranchAndBound:
    def __init__(self, gad: ArcGadget, rules: _Rules, incumbent: ArcSystem):
        self.gad = gad
        self.rules = rules
        self.order = _search_order(gad)
        self.pos = {x: i for i, x in enumerate(self.order)}
        self.later = [[y for y in gad.adjacency[x] if self.pos[y] > self.pos[x]] for x in self.order]
        self.earlier = [[y for y in gad.adjacency[x] if self.pos[y] < self.pos[x]] for x in self.order]
        n = len(self.order)
        # remaining oscillation bound per step
        zero = rules.zero
        self.slack = [zero] * (n + 1)
        for (x, y), w in gad.weights.items():
            px, py = self.pos[x], self.pos[y]
            upto = min(px, py) if rules.mode == PV_PATH else max(px, py)
            for i in range(upto + 1):
                self.slack[i] += w
        self.track_loops = rules.mode == PV_PATH
        self.best_total = incumbent.total
        self.best_path: Optional[list] = None
        self.expanded = 0

    # frontier: dict (x, y) -> (flow, label) for used edges x earlier, y later;
    # flow +1 means x -> y.

    def bound(self, i: int, frontier: dict) -> Number:
        if self.rules.mode == PV_PATH:
            return self.slack[i]
        total = self.slack[i]
        for (x, _), (flow, _) in frontier.items():
            total += self.gad.nodes[x].value if flow > 0 else -self.gad.nodes[x].value
        return total

    def key(self, frontier: dict) -> tuple:
        if not self.track_loops:
            return tuple(sorted((k, v[0]) for k, v in frontier.items()))
        relabel: dict[int, int] = {}
        items = []
        for k in sorted(frontier):
            flow, lab = frontier[k]
            items.append((k, flow, relabel.setdefault(lab, len(relabel))))
        return tuple(items)

    def expand(self, i: int, frontier: dict):
        x = self.order[i]
        rules = self.rules
        incoming = []  # (neighbour, +1 if flow enters x, label)
        rest = dict(frontier)
        for y in self.earlier[i]:
            item = rest.pop((y, x), None)
            if item is not None:
                incoming.append((y, item[0], item[1]))
        later = self.later[i]
        term = rules.term[x]
        fresh = max((lab for _, lab in rest.values()), default=-1) + 1
        for y, _, lab in incoming:
            fresh = max(fresh, lab + 1)

        def emit(contrib, assigned, merge=None):
            nf = dict(rest)
            if merge is not None and self.track_loops:
                keep, drop = merge
                for k, (fl, lab) in nf.items():
                    if lab == drop:
                        nf[k] = (fl, keep)
            for y, flow, lab in assigned:
                nf[(x, y)] = (flow, lab)
                contrib = contrib + rules.edge_gain(x, y)
            return contrib, nf

        zero = rules.zero
        if rules.shared[x]:
            balance = sum(d for _, d, _ in incoming)
            for combo in itertools.product((0, 1, -1), repeat=len(later)):
                # combo entry +1: flow x -> y (leaves x)
                if balance - sum(combo) != 0:
                    continue
                assigned = [(y, c, 0) for y, c in zip(later, combo) if c]
                yield emit(zero, assigned)
            return
        k = len(incoming)
        if k == 0:
            yield emit(zero, [])
            for y in later:
                if rules.can_end(x, y):
                    yield emit(-term, [(y, 1, fresh)])
                    yield emit(term, [(y, -1, fresh)])
            for y1 in later:
                for y2 in later:
                    if y1 != y2:
                        # flow y1 -> x -> y2
                        yield emit(zero, [(y1, -1, fresh), (y2, 1, fresh)])
        elif k == 1:
            y0, d0, lab0 = incoming[0]
            if rules.can_end(x, y0):
                yield emit(term if d0 > 0 else -term, [])
            for y in later:
                yield emit(zero, [(y, 1 if d0 > 0 else -1, lab0)])
        elif k == 2:
            (_, d1, l1), (_, d2, l2) = incoming
            if d1 + d2 != 0:
                return
            if self.track_loops and l1 == l2:
                return
            yield emit(zero, [], merge=(l1, l2))

    def run(self) -> None:
        """Sweep the vertex order, merging equal frontier states and pruning by bound.

        States that agree on the frontier have identical futures, so only the
        best prefix of each is kept; a state is discarded once its value plus
        the admissible bound cannot beat the incumbent.
        """
        zero = self.rules.zero
        layer = {self.key({}): (zero, {}, None)}
        history = []
        for i in range(len(self.order)):
            nxt: dict = {}
            for key, (current, frontier, _) in layer.items():
                if current + self.bound(i, frontier) <= self.best_total:
                    continue
                self.expanded += 1
                for contrib, nf in self.expand(i, frontier):
                    value = current + contrib
                    nkey = self.key(nf)
                    held = nxt.get(nkey)
                    if held is None or value > held[0]:
                        nxt[nkey] = (value, nf, key)
            history.append(nxt)
            layer = nxt
        final = layer.get(self.key({}))
        if final is None or final[0] <= self.best_total:
            return
        self.best_total = final[0]
        path = []
        key = self.key({})
        for i in range(len(history) - 1, -1, -1):
            _, nf, parent = history[i][key]
            path.append(nf)
            key = parent
        self.best_path = path[::-1]

    def flows(self) -> list[tuple[int, int]]:
        used = set()
        for nf in self.best_path or []:
            for (x, y), (flow, _) in nf.items():
                used.add((x, y) if flow > 0 else (y, x))
        return sorted(used)


def _spanning_adjacency(gad: ArcGadget) -> tuple[tuple[int, ...], ...]:
    n = len(gad.nodes)
    adj: list[list[int]] = [[] for _ in range(n)]
    seen = [False] * n
    if n:
        seen[0] = True
        queue = [0]
        for x in queue:
            for y in gad.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    adj[x].append(y)
                    adj[y].append(x)
                    queue.append(y)
    return tuple(tuple(a) for a in adj)


DEFAULT_TREE_CAP = 20000
DEFAULT_SEARCH_CAP = 64


def variation_solve(
    gad: ArcGadget,
    mode: str = PV_POINT,
    method: str = "auto",
    cap_segments: Optional[int] = None,
) -> ArcSystem:
    """Maximising arc system for ``mode``.

    ``method`` is ``"tree"`` (requires a tree gadget), ``"search"`` (branch and
    bound, any graph) or ``"auto"`` (tree DP on trees, search otherwise).
    """
    mode = parse_mode(mode)
    rules = _Rules(gad, mode)
    if method == "auto":
        method = "tree" if gad.is_tree else "search"
    if method == "tree":
        if not gad.is_tree:
            raise ValueError("tree DP needs a tree-shaped graph")
        cap = cap_segments if cap_segments is not None else DEFAULT_TREE_CAP
        if gad.segment_count > cap:
            raise CapExceeded("tree DP", gad.segment_count, cap)
        return _tree_solve(gad, rules)
    if method != "search":
        raise ValueError(f"unknown method {method!r}")
    cap = cap_segments if cap_segments is not None else DEFAULT_SEARCH_CAP
    if gad.segment_count > cap:
        raise CapExceeded("branch and bound", gad.segment_count, cap)
    seed = _tree_solve(gad, rules, _spanning_adjacency(gad), method="search")
    bnb = _BranchAndBound(gad, rules, seed)
    bnb.run()
    if bnb.best_path is None:
        return seed
    system = _trace(gad, rules, bnb.flows(), "search")
    if not close(system.total, bnb.best_total):
        raise AssertionError(f"search reconstruction mismatch: {system.total} vs {bnb.best_total}")
    return system


def solve(g: MetricGraph, f: PiecewiseLinearFn, mode: str = PV_POINT, **kwargs) -> ArcSystem:
    return variation_solve(build_gadget(g, f), mode, **kwargs)


def pointwise_variation(g: MetricGraph, f: PiecewiseLinearFn, mode: str = PV_POINT, **kwargs) -> Number:
    return solve(g, f, mode, **kwargs).total


# ---------------------------------------------------------------------------
# representatives, jumps, truncations


def discontinuity_points(g: MetricGraph, f: PiecewiseLinearFn) -> list[PointRef]:
    return [p for p in f.critical_points(g) if not f.is_continuous_at(g, p)]


def good_representative(g: MetricGraph, f: PiecewiseLinearFn) -> PiecewiseLinearFn:
    """Set the value at each discontinuity to the limit along the smallest germ."""
    vvals = dict(f.vertex_values)
    overrides = dict(f.overrides)
    for p in discontinuity_points(g, f):
        eid, direction = g.directions_at(p)[0]
        value = f.limit_at(g, p, eid, direction)
        if p.vertex is not None:
            vvals[p.vertex] = value
        else:
            overrides.pop((p.edge, p.t), None)
            if f.limit(p.edge, p.t, BACKWARD) != value:
                overrides[(p.edge, p.t)] = value
    return PiecewiseLinearFn(f.pieces, vvals, overrides)


def var_total(g: MetricGraph, f: PiecewiseLinearFn, **kwargs) -> Number:
    return pointwise_variation(g, good_representative(g, f), PV_POINT, **kwargs)


@dataclass(frozen=True)
class JumpRecord:
    point: PointRef
    limits: tuple[tuple[tuple[int, str], Number], ...]
    value: Number
    size: Number

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "limits": [{"edge": e, "direction": d, "value": to_json_number(v)} for (e, d), v in self.limits],
            "value": to_json_number(self.value),
            "size": to_json_number(self.size),
        }


def jump_size(g: MetricGraph, f: PiecewiseLinearFn, p: PointRef) -> Number:
    lims = [v for _, v in f.limits(g, p)]
    val = f.value(g, p)
    spread = max(lims) - min(lims)
    return max(spread, max(abs(val - L) for L in lims))


def jump_points(g: MetricGraph, f: PiecewiseLinearFn, kappa: Number) -> list[JumpRecord]:
    if not kappa > 0:
        raise ValueError("jump threshold must be positive")
    out = []
    for p in f.critical_points(g):
        size = jump_size(g, f, p)
        if size >= kappa and not close(size, 0 * size):
            out.append(JumpRecord(p, tuple(f.limits(g, p)), f.value(g, p), size))
    return out


def truncate(g: MetricGraph, f: PiecewiseLinearFn, t: Number, r: Number) -> tuple[PiecewiseLinearFn, PiecewiseLinearFn]:
    """``(min(t, f), max(t, min(t + r, f)))``."""
    if r < 0:
        raise ValueError("truncation width must be nonnegative")
    return clip(g, f, hi=t), clip(g, f, lo=t, hi=t + r)


def pieces_of(g: MetricGraph, f: PiecewiseLinearFn) -> dict[int, tuple[Piece, ...]]:
    return {e.id: f.pieces[e.id] for e in g.edges}
