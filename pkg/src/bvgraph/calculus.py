"""Total-variation brackets, curve boundaries, perimeter bounds, coarea sweeps and jump smoothing."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .functions import superlevel_indicator
from .graph import (
    BACKWARD,
    FORWARD,
    GEODESIC,
    EdgeSubset,
    MetricGraph,
    Piece,
    PiecewiseLinearFn,
    PointRef,
    indicator_function,
)
from .measure import ball_measure
from .numeric import Number, close, leq, to_json_number
from .variation import (
    IV,
    PV_POINT,
    ArcSystem,
    build_gadget,
    discontinuity_points,
    good_representative,
    jump_size,
    variation_solve,
)

SCAN_HALVINGS = 20


class DensityPreconditionError(ValueError):
    """No admissible radius keeps the ball density below the required bound."""

    def __init__(self, point: PointRef, best_ratio: Number, bound: Number):
        super().__init__(
            f"density precondition violated at {point}: best ratio {float(best_ratio):.6g} vs bound {float(bound):.6g}"
        )
        self.point = point
        self.best_ratio = best_ratio
        self.bound = bound


# ---------------------------------------------------------------------------
# curve boundary and perimeter


@dataclass(frozen=True)
class CurveBoundary:
    points: tuple[PointRef, ...]

    @property
    def count(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {"count": self.count, "points": [p.to_json() for p in self.points]}


def curve_boundary(g: MetricGraph, E: EdgeSubset) -> CurveBoundary:
    """Points whose every small ball meets both the set and its complement."""
    chi = good_representative(g, indicator_function(g, E))
    pts = []
    for p in chi.critical_points(g):
        lims = {v for _, v in chi.limits(g, p)}
        if len(lims) > 1:
            pts.append(p)
    return CurveBoundary(tuple(pts))


def local_scale(g: MetricGraph, f: PiecewiseLinearFn, p: PointRef) -> Number:
    """Length of the shortest elementary segment of ``f`` touching ``p``."""
    best = None
    for eid, direction in g.directions_at(p):
        offs = f.critical_offsets(g, eid)
        if p.vertex is not None:
            span = offs[1] - offs[0] if direction == BACKWARD else offs[-1] - offs[-2]
        else:
            i = offs.index(p.t)
            span = offs[i + 1] - offs[i] if direction == BACKWARD else offs[i] - offs[i - 1]
        best = span if best is None else min(best, span)
    return best


@dataclass(frozen=True)
class PerimeterBound:
    value: Number
    scale_index: int
    radii: tuple[tuple[PointRef, Number, Number], ...]  # (point, delta, ratio)
    c0: Number

    def to_json(self) -> dict:
        return {
            "value": to_json_number(self.value),
            "scale_index": self.scale_index,
            "c0": to_json_number(self.c0),
            "balls": [
                {"point": p.to_json(), "delta": to_json_number(d), "ratio": to_json_number(r)} for p, d, r in self.radii
            ],
        }


def perimeter_upper_bound(g: MetricGraph, E: EdgeSubset, c0: Number, halvings: int = SCAN_HALVINGS) -> PerimeterBound:
    """Smallest admissible sum of inner-ball density ratios over the curve boundary.

    A scale ``i`` uses ``delta_j = L_j / 2^i`` at each boundary point ``x_j``
    (``L_j`` its local segment length) and is admissible when every ratio is
    strictly below ``c0``.
    """
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    inner = g.with_metric(GEODESIC)
    chi = good_representative(g, indicator_function(g, E))
    points = curve_boundary(g, E).points
    if not points:
        return PerimeterBound(Fraction(0), 0, (), c0)
    base = {p: local_scale(g, chi, p) for p in points}
    best: Optional[PerimeterBound] = None
    lowest = {p: None for p in points}
    for i in range(halvings + 1):
        rows = []
        for p in points:
            delta = base[p] / 2**i
            ratio = ball_measure(inner, p, delta) / delta
            if lowest[p] is None or ratio < lowest[p]:
                lowest[p] = ratio
            rows.append((p, delta, ratio))
        if all(r < c0 for _, _, r in rows):
            total = sum((r for _, _, r in rows), Fraction(0))
            if best is None or total < best.value:
                best = PerimeterBound(total, i, tuple(rows), c0)
    if best is None:
        worst = max(points, key=lambda p: (lowest[p], p.sort_key()))
        raise DensityPreconditionError(worst, lowest[worst], c0)
    return best


# ---------------------------------------------------------------------------
# total-variation bracket


@dataclass(frozen=True)
class JumpCost:
    point: PointRef
    limits: tuple[Number, ...]
    centre: Number
    cost: Number


@dataclass(frozen=True)
class TvBracket:
    lower: Number
    upper: Number
    var_value: Number
    iv_value: Number
    lower_witness: ArcSystem
    edge_integral: Number
    jump_costs: tuple[JumpCost, ...]

    def to_json(self, gadget=None) -> dict:
        return {
            "lower": to_json_number(self.lower),
            "upper": to_json_number(self.upper),
            "lower_witness": {
                "var_total": to_json_number(self.var_value),
                "iv": to_json_number(self.iv_value),
                "arcs": self.lower_witness.to_json(gadget) if gadget is not None else None,
            },
            "upper_witness": {
                "edge_integral": to_json_number(self.edge_integral),
                "jump_costs": [
                    {
                        "point": j.point.to_json(),
                        "limits": [to_json_number(v) for v in j.limits],
                        "centre": to_json_number(j.centre),
                        "cost": to_json_number(j.cost),
                    }
                    for j in self.jump_costs
                ],
            },
        }


def gradient_integral(g: MetricGraph, f: PiecewiseLinearFn) -> Number:
    """Sum over edges of the integral of ``|f'|``."""
    total: Number = Fraction(0)
    for e in sorted(g.edges, key=lambda e: e.id):
        for p in f.pieces[e.id]:
            total += abs(p.v1 - p.v0)
    return total


def median_cost(values: Sequence[Number]) -> tuple[Number, Number]:
    """``min_c sum |v - c|`` and a minimiser (the lower median)."""
    vals = sorted(values)
    c = vals[(len(vals) - 1) // 2]
    return c, sum((abs(v - c) for v in vals), 0 * c)


def tv_bracket(g: MetricGraph, f: PiecewiseLinearFn, cap_segments: Optional[int] = None) -> TvBracket:
    rep = good_representative(g, f)
    gad = build_gadget(g, rep)
    var_sys = variation_solve(gad, PV_POINT, cap_segments=cap_segments)
    iv_sys = variation_solve(gad, IV, cap_segments=cap_segments)
    lower = max(var_sys.total, iv_sys.total)
    witness = iv_sys if iv_sys.total >= var_sys.total else var_sys
    costs = []
    for p in discontinuity_points(g, f):
        lims = tuple(v for _, v in f.limits(g, p))
        centre, cost = median_cost(lims)
        costs.append(JumpCost(p, lims, centre, cost))
    integral = gradient_integral(g, f)
    upper = integral + sum((c.cost for c in costs), 0 * integral)
    return TvBracket(lower, upper, var_sys.total, iv_sys.total, witness, integral, tuple(costs))


# ---------------------------------------------------------------------------
# coarea


@dataclass(frozen=True)
class CoareaSweep:
    levels: tuple[Number, ...]
    thresholds: tuple[Number, ...]
    var_levels: tuple[Number, ...]
    integral: Number

    def to_json(self) -> dict:
        return {
            "levels": [to_json_number(v) for v in self.levels],
            "thresholds": [to_json_number(t) for t in self.thresholds],
            "var_levels": [to_json_number(v) for v in self.var_levels],
            "integral": to_json_number(self.integral),
        }


def critical_levels(g: MetricGraph, f: PiecewiseLinearFn) -> list[Number]:
    vals = set(f.critical_values(g))
    for p in f.critical_points(g):
        vals.update(v for _, v in f.limits(g, p))
    return sorted(vals)


def coarea_sweep(g: MetricGraph, f: PiecewiseLinearFn, cap_segments: Optional[int] = None) -> CoareaSweep:
    """Integrate ``t -> Var(chi_{f > t})``, constant between consecutive critical values."""
    levels = critical_levels(g, f)
    thresholds, var_levels = [], []
    integral: Number = Fraction(0)
    for lo, hi in zip(levels, levels[1:]):
        t = (lo + hi) / 2
        chi = good_representative(g, superlevel_indicator(g, f, t))
        var = variation_solve(build_gadget(g, chi), PV_POINT, cap_segments=cap_segments).total
        thresholds.append(t)
        var_levels.append(var)
        integral += var * (hi - lo)
    return CoareaSweep(tuple(levels), tuple(thresholds), tuple(var_levels), integral)


# ---------------------------------------------------------------------------
# one-dimensional oracle


def path_order(g: MetricGraph) -> list[tuple[int, bool]]:
    """Edges of a path graph from one end to the other as ``(edge, reversed)``."""
    if not g.is_tree or any(g.degree(v.id) > 2 for v in g.vertices):
        raise ValueError("not a path graph")
    ends = [v.id for v in g.vertices if g.degree(v.id) == 1]
    cur = min(ends)
    seen: set[int] = set()
    out = []
    while True:
        step = [(eid, d) for eid, d in g.incident(cur) if eid not in seen]
        if not step:
            return out
        eid, direction = step[0]
        seen.add(eid)
        e = g.edge(eid)
        flipped = direction == FORWARD  # we leave through the t = L end
        out.append((eid, flipped))
        cur = e.u if flipped else e.v


def classical_variation_interval(g: MetricGraph, f: PiecewiseLinearFn) -> Number:
    """Essential variation on a path graph: monotone-piece increments plus jumps.

    Point values never enter: the sum of ``|L_left - L_right|`` over interior
    breakpoints is the jump part of the essential variation.
    """
    seq: list[Piece] = []
    for eid, flipped in path_order(g):
        ps = list(f.pieces[eid])
        if flipped:
            ps = [Piece(-p.t1, -p.t0, p.v1, p.v0) for p in reversed(ps)]
        seq.extend(ps)
    total: Number = Fraction(0)
    for p in seq:
        total += abs(p.v1 - p.v0)
    for left, right in zip(seq, seq[1:]):
        total += abs(right.v0 - left.v1)
    return total


def classical_variation_samples(values: Sequence[Number]) -> Number:
    """Partition variation of a finite sample sequence."""
    return sum((abs(b - a) for a, b in zip(values, values[1:])), 0 * values[0] if values else Fraction(0))


# ---------------------------------------------------------------------------
# jump smoothing


@dataclass(frozen=True)
class SmoothingStep:
    point: PointRef
    jump: Number
    radius: Number
    average: Number
    ratio: Number


@dataclass(frozen=True)
class SmoothedFunction:
    fn: PiecewiseLinearFn
    pv_value: Number
    bound: Number
    certified: bool
    steps: tuple[SmoothingStep, ...]
    mass: Number

    def to_json(self) -> dict:
        return {
            "pv_value": to_json_number(self.pv_value),
            "bound": to_json_number(self.bound),
            "certified": self.certified,
            "mass": to_json_number(self.mass),
            "steps": [
                {
                    "point": s.point.to_json(),
                    "jump": to_json_number(s.jump),
                    "radius": to_json_number(s.radius),
                    "average": to_json_number(s.average),
                    "ratio": to_json_number(s.ratio),
                }
                for s in self.steps
            ],
        }


def _blend_knots(v_r: Number, v_2r: Number, avg: Number, r: Number) -> list[tuple[Number, Number]]:
    """Knots ``(d, w(d))`` of ``w = v(1 - eta) + eta * avg`` on ``[r, 2r]``.

    With ``v`` linear and ``eta = 2 - d/r`` the blend is quadratic in ``d``; its
    piecewise-linear interpolant through the ends and the vertex has the same
    monotone pieces and the same values at their ends.
    """
    # w(s) for s = (d - r) / r in [0, 1]: eta = 1 - s, v = v_r + s (v_2r - v_r)
    slope = v_2r - v_r
    # w(s) = (v_r + s*slope) * s + (1 - s) * avg = avg + s (v_r - avg) + s^2 slope
    knots = [(r, avg), (2 * r, v_2r)]
    if slope != 0:
        s_star = -(v_r - avg) / (2 * slope)
        if 0 < s_star < 1:
            w = avg + s_star * (v_r - avg) + s_star * s_star * slope
            knots.insert(1, (r + s_star * r, w))
    return knots


def smooth_jumps(
    g: MetricGraph,
    f: PiecewiseLinearFn,
    eps: Number,
    c0: Number,
    cap_segments: Optional[int] = None,
) -> SmoothedFunction:
    """Blend ``f`` with its ball average around every jump point.

    Jumps are treated in decreasing size.  Each uses an inner ball ``B`` of
    radius ``r`` small enough that ``2B`` holds no other critical point and the
    balls have total measure below ``eps``; the cutoff is ``1`` on ``B`` and
    falls with slope ``1/r`` to ``0`` at distance ``2r``.
    """
    if not eps > 0 or not c0 > 0:
        raise ValueError("eps and c0 must be positive")
    inner = g.with_metric(GEODESIC)
    jumps = discontinuity_points(g, f)
    if not jumps:
        pv = variation_solve(build_gadget(g, f), PV_POINT, cap_segments=cap_segments).total
        var = variation_solve(build_gadget(g, good_representative(g, f)), PV_POINT, cap_segments=cap_segments).total
        bound = (3 + 4 * c0) * var
        return SmoothedFunction(f, pv, bound, leq(pv, bound), (), 0 * eps)

    sized = sorted(jumps, key=lambda p: (-jump_size(g, f, p), p.sort_key()))
    degree_sum = sum(g.point_degree(p) for p in jumps)
    radius_cap = eps / (4 * degree_sum)
    cuts: dict[int, set] = {e.id: set(f.critical_offsets(g, e.id)) for e in g.edges}
    plan = []
    for p in sized:
        scale = local_scale(g, f, p)
        r = min(scale / 4, radius_cap)
        r = _dyadic_below(r)
        ratio = ball_measure(inner, p, 2 * r) / r
        if not leq(ratio, 2 * c0):
            raise DensityPreconditionError(p, ratio, 2 * c0)
        plan.append((p, r, ratio))
        for eid, direction in g.directions_at(p):
            base = _germ_origin(g, p, eid, direction)
            sign = 1 if direction == BACKWARD else -1
            for d in (r, 2 * r):
                cuts[eid].add(base + sign * d)

    replaced: dict[int, list[tuple[Number, Number, list[tuple[Number, Number]]]]] = {e.id: [] for e in g.edges}
    steps = []
    mass = 0 * eps
    for p, r, ratio in plan:
        germs = g.directions_at(p)
        integral = 0 * eps
        for eid, direction in germs:
            base = _germ_origin(g, p, eid, direction)
            sign = 1 if direction == BACKWARD else -1
            near = f.limit(eid, base, direction)
            far = f.limit(eid, base + sign * r, direction)
            integral += (near + far) * r / 2
        avg = integral / (len(germs) * r)
        mass += ball_measure(inner, p, r)
        for eid, direction in germs:
            base = _germ_origin(g, p, eid, direction)
            sign = 1 if direction == BACKWARD else -1
            v_r = f.limit(eid, base + sign * r, direction)
            v_2r = f.limit(eid, base + sign * 2 * r, direction)
            knots = [(base + sign * d, w) for d, w in _blend_knots(v_r, v_2r, avg, r)]
            lo, hi = sorted((base, base + sign * 2 * r))
            replaced[eid].append((lo, hi, [(base, avg)] + knots))
        steps.append(SmoothingStep(p, jump_size(g, f, p), r, avg, ratio))

    new_pieces = {}
    for e in g.edges:
        new_pieces[e.id] = _rebuild_edge(f, e.id, sorted(cuts[e.id]), replaced[e.id])
    vvals = {}
    for v in g.vertices:
        eid, direction = g.incident(v.id)[0]
        t = Fraction(0) if direction == BACKWARD else g.edge(eid).length
        vvals[v.id] = _edge_value(new_pieces[eid], t, direction)
    result = PiecewiseLinearFn(new_pieces, vvals, {})
    pv = variation_solve(build_gadget(g, result), PV_POINT, cap_segments=cap_segments).total
    var = variation_solve(build_gadget(g, good_representative(g, f)), PV_POINT, cap_segments=cap_segments).total
    bound = (3 + 4 * c0) * var
    return SmoothedFunction(result, pv, bound, leq(pv, bound), tuple(steps), mass)


def _dyadic_below(x: Number) -> Number:
    if isinstance(x, float):
        r = 1.0
        while r > x:
            r /= 2
        while 2 * r <= x:
            r *= 2
        return r
    r = Fraction(1)
    while r > x:
        r /= 2
    while 2 * r <= x:
        r *= 2
    return r


def _germ_origin(g: MetricGraph, p: PointRef, eid: int, direction: str) -> Number:
    if p.vertex is None:
        return p.t
    return Fraction(0) if direction == BACKWARD else g.edge(eid).length


def _edge_value(pieces: tuple[Piece, ...], t: Number, direction: str) -> Number:
    for p in pieces:
        if direction == BACKWARD and p.t0 == t:
            return p.v0
        if direction == FORWARD and p.t1 == t:
            return p.v1
    raise KeyError(t)


def _rebuild_edge(f: PiecewiseLinearFn, eid: int, knots: list, replaced: list) -> tuple[Piece, ...]:
    """Pieces on ``knots`` following ``f`` except on replaced windows."""
    windows = sorted(replaced, key=lambda w: w[0])
    extra = sorted({t for _, _, pts in windows for t, _ in pts} | set(knots))
    out = []
    for lo, hi in zip(extra, extra[1:]):
        win = next((w for w in windows if w[0] <= lo and hi <= w[1]), None)
        if win is None:
            idx = f.piece_index(eid, lo, BACKWARD)
            piece = f.pieces[eid][idx]
            out.append(Piece(lo, hi, piece.at(lo), piece.at(hi)))
            continue
        pts = dict(win[2])
        out.append(Piece(lo, hi, _interp(pts, lo), _interp(pts, hi)))
    return tuple(out)


def _interp(pts: dict, t: Number) -> Number:
    if t in pts:
        return pts[t]
    xs = sorted(pts)
    for a, b in zip(xs, xs[1:]):
        if a < t < b:
            return pts[a] + (pts[b] - pts[a]) * (t - a) / (b - a)
    raise KeyError(t)
