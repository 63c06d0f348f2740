"""Hypothesis checkers: ball density, doubling, Poincaré sampling, measure-theoretic boundary.

Every limit is reported over a declared finite radius grid.  A Poincaré
violation disproves the inequality for the given constants; passes are
sampled evidence only.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2

from .calculus import DensityPreconditionError, curve_boundary, perimeter_upper_bound, tv_bracket
from .graph import (
    AMBIENT,
    BACKWARD,
    GEODESIC,
    EdgeSubset,
    MetricGraph,
    PiecewiseLinearFn,
    PointRef,
    geodesic_distance,
    indicator_function,
)
from .measure import BallSpec, ball_measure, ball_measure_float, ball_subset, codim1_content, dyadic_radii, h1_of_subset
from .numeric import Number, is_exact, leq, to_json_number
from .variation import good_representative

MTB_THRESHOLD = Fraction(1, 100)
STABLE_BLOCK = 3
DOUBLING_BOUND = 2**18
EXACT_EDGE_LIMIT = 128  # larger graphs use float64 ball measures in doubling scans


def _num_list(values) -> list:
    return [to_json_number(v) for v in values]


def _check_radii(radii: Sequence[Number]) -> tuple[Number, ...]:
    radii = tuple(radii)
    if not radii:
        raise ValueError("radius grid is empty")
    if any(not r > 0 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    return radii


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityProfile:
    point: PointRef
    samples: tuple[tuple[Number, Number], ...]  # (r, H^1(B(x,r))/r), r decreasing
    min_ratio: Number
    limit_ratio: Number
    stabilized: bool

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "samples": [{"r": to_json_number(r), "ratio": to_json_number(q)} for r, q in self.samples],
            "min_ratio": to_json_number(self.min_ratio),
            "limit_ratio": to_json_number(self.limit_ratio),
            "stabilized": self.stabilized,
        }

    def csv_rows(self) -> list[tuple[float, float]]:
        return [(float(r), float(q)) for r, q in self.samples]


def density_liminf(g: MetricGraph, x: PointRef, radii: Sequence[Number], block: int = STABLE_BLOCK) -> DensityProfile:
    """Ball density ratios along a decreasing radius grid.

    ``stabilized`` records whether the last ``block`` ratios agree, the grid
    certificate that the smallest scanned radius is below the local scale.
    """
    radii = _check_radii(radii)
    g.check_point(x)
    samples = tuple((r, ball_measure(g, x, r) / r) for r in radii)
    tail = [q for _, q in samples[-block:]]
    stable = len(tail) == block and all(leq(q, tail[0]) and leq(tail[0], q) for q in tail)
    return DensityProfile(x, samples, min(q for _, q in samples), samples[-1][1], stable)


# ---------------------------------------------------------------------------
# doubling


@dataclass(frozen=True)
class DoublingReport:
    max_ratio: Number
    worst_center: PointRef
    worst_radius: Number
    samples: int
    radii: tuple[Number, ...]

    def to_json(self) -> dict:
        return {
            "max_ratio": to_json_number(self.max_ratio),
            "worst_case": {"center": self.worst_center.to_json(), "r": to_json_number(self.worst_radius)},
            "samples": self.samples,
            "radii": _num_list(self.radii),
        }


def doubling_scan(
    g: MetricGraph, centers: Sequence[PointRef], radii: Sequence[Number], exact: bool = True
) -> DoublingReport:
    """max of H^1(B(x,2r)) / H^1(B(x,r)) over the sample grid.

    ``exact=False`` uses float64 ball measures, for large graphs.
    """
    measure = ball_measure if exact else ball_measure_float
    centers, radii = list(centers), list(radii)
    if not centers or not radii:
        raise ValueError("doubling scan needs nonempty centre and radius samples")
    best = None
    for x in centers:
        for r in radii:
            small = measure(g, x, r)
            if not small > 0:
                raise RuntimeError(f"ball of zero measure at {x}, r={r}")
            ratio = measure(g, x, 2 * r) / small
            if best is None or ratio > best[0]:
                best = (ratio, x, r)
    return DoublingReport(best[0], best[1], best[2], len(centers) * len(radii), tuple(radii))


# ---------------------------------------------------------------------------
# Poincaré


@dataclass(frozen=True)
class PoincareParams:
    p: Number = 1
    C: Number = 4
    lam: Number = 3

    def __post_init__(self) -> None:
        if not self.p >= 1:
            raise ValueError("p must be at least 1")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.lam >= 1:
            raise ValueError("lambda must be at least 1")

    def to_json(self) -> dict:
        return {"p": to_json_number(self.p), "C": to_json_number(self.C), "lambda": to_json_number(self.lam)}


@dataclass(frozen=True)
class PoincareResult:
    ball: BallSpec
    lhs: Number
    rhs: Number
    ok: bool
    mean: Number

    def to_json(self) -> dict:
        return {
            "center": self.ball.center.to_json(),
            "r": to_json_number(self.ball.radius),
            "lhs": to_json_number(self.lhs),
            "rhs": to_json_number(self.rhs),
            "mean": to_json_number(self.mean),
            "ok": self.ok,
        }


def _fast(x: Number):
    # gmpy2 rationals run the exact integrals an order of magnitude faster than Fraction
    return x if isinstance(x, float) else gmpy2.mpq(x.numerator, x.denominator)


def _back(x) -> Number:
    if isinstance(x, float):
        return x
    if type(x).__name__ == "mpfr":
        return float(x)
    return Fraction(int(x.numerator), int(x.denominator))


def _converted(u: PiecewiseLinearFn, conv) -> dict[int, list[tuple]]:
    return {eid: [(conv(p.t0), conv(p.t1), conv(p.v0), conv(p.v1)) for p in ps] for eid, ps in u.pieces.items()}


def _clipped(pieces: dict[int, list[tuple]], intervals: dict[int, list[tuple]]) -> list[tuple]:
    """(length, start value, end value) of every piece clipped to the trace intervals."""
    out = []
    for eid, ivs in intervals.items():
        ps = pieces[eid]
        for a, b in ivs:
            for t0, t1, v0, v1 in ps:
                if t1 <= a:
                    continue
                if t0 >= b:
                    break
                lo, hi = max(a, t0), min(b, t1)
                if lo < hi:
                    slope = (v1 - v0) / (t1 - t0)
                    y0 = v0 if lo == t0 else v0 + slope * (lo - t0)
                    y1 = v1 if hi == t1 else v0 + slope * (hi - t0)
                    out.append((hi - lo, y0, y1))
    return out


def _abs_integral(length: Number, y0: Number, y1: Number) -> Number:
    # integral of |linear| with end values y0, y1, split at the zero crossing
    if (y0 >= 0 and y1 >= 0) or (y0 <= 0 and y1 <= 0):
        return length * (abs(y0) + abs(y1)) / 2
    return length * (y0 * y0 + y1 * y1) / (2 * (abs(y0) + abs(y1)))


@dataclass(frozen=True)
class _BallTraces:
    inner: EdgeSubset
    inner_mass: Number
    outer: EdgeSubset
    outer_mass: Number
    cache: dict = field(default_factory=dict, compare=False)

    def intervals(self, conv, inner: bool) -> dict[int, list[tuple]]:
        key = (conv, inner)
        if key not in self.cache:
            src = self.inner if inner else self.outer
            self.cache[key] = {eid: [(conv(a), conv(b)) for a, b in ivs] for eid, ivs in src.intervals.items()}
        return self.cache[key]


def _ball_traces(g: MetricGraph, ball: BallSpec, lam: Number) -> _BallTraces:
    inner = ball_subset(g, ball)
    outer = ball_subset(g, ball.scaled(lam))
    mass = h1_of_subset(g, inner)
    if not mass > 0:
        raise ValueError("ball has zero measure")
    return _BallTraces(inner, mass, outer, h1_of_subset(g, outer))


def poincare_check(
    g: MetricGraph,
    ball: BallSpec,
    u: PiecewiseLinearFn,
    params: PoincareParams,
    traces: Optional[_BallTraces] = None,
) -> PoincareResult:
    """Compare the mean oscillation of ``u`` on the ball with ``C r (mean |u'|^p on lam*B)^(1/p)``."""
    if not u.is_curve_continuous(g):
        raise ValueError("upper gradient not representable")
    tr = traces or _ball_traces(g, ball, params.lam)
    exact = is_exact(tr.inner_mass, tr.outer_mass) and _exact_fn(u)
    conv = _fast if exact else float
    pieces = _converted(u, conv)
    parts = _clipped(pieces, tr.intervals(conv, inner=True))
    mass = _fast(tr.inner_mass) if exact else float(tr.inner_mass)
    mean = sum(ln * (y0 + y1) for ln, y0, y1 in parts) / (2 * mass)
    osc = sum(_abs_integral(ln, y0 - mean, y1 - mean) for ln, y0, y1 in parts)
    lhs = _back(osc / mass)
    mean = _back(mean)

    outer = _clipped(pieces, tr.intervals(conv, inner=False))
    if params.p == 1:
        # length * |slope| is the rise of the piece
        grad = sum(abs(y1 - y0) for _, y0, y1 in outer)
        root = _back(grad / (_fast(tr.outer_mass) if exact else float(tr.outer_mass)))
    else:
        p = float(params.p)
        grad = math.fsum(float(ln) * (abs(float(y1 - y0)) / float(ln)) ** p for ln, y0, y1 in outer)
        root = (grad / float(tr.outer_mass)) ** (1.0 / p)
    rhs = params.C * ball.radius * root
    return PoincareResult(ball, lhs, rhs, leq(lhs, rhs), mean)


def _exact_fn(u: PiecewiseLinearFn) -> bool:
    return not any(
        type(x) is float for ps in u.pieces.values() for p in ps for x in (p.t0, p.t1, p.v0, p.v1)
    )


@dataclass(frozen=True)
class PoincareSample:
    checks: int
    violations: tuple[tuple[PoincareResult, int], ...]  # (result, function seed)
    worst_ratio: Number
    params: PoincareParams
    seed: int
    note: str = "passes are sampled evidence only; a violation disproves the inequality for these constants"

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "checks": self.checks,
            "violations": [dict(r.to_json(), function_seed=s) for r, s in self.violations],
            "worst_ratio": to_json_number(self.worst_ratio),
            "params": self.params.to_json(),
            "seed": self.seed,
            "ok": self.ok,
            "note": self.note,
        }


def poincare_sample(
    g: MetricGraph,
    balls: Sequence[BallSpec],
    params: PoincareParams,
    seed: int = 0,
    per_ball: int = 64,
) -> PoincareSample:
    """Check ``per_ball`` seeded continuous PL functions on every ball."""
    from .gallery import random_function

    rng = random.Random(seed)
    checks, worst, bad = 0, Fraction(0), []
    for ball in balls:
        traces = _ball_traces(g, ball, params.lam)
        for _ in range(per_ball):
            fseed = rng.randrange(2**31)
            res = poincare_check(g, ball, random_function(g, fseed, continuous=True), params, traces)
            checks += 1
            if res.rhs > 0:
                worst = max(worst, res.lhs / res.rhs)
            elif res.lhs > 0:
                worst = math.inf
            if not res.ok:
                bad.append((res, fseed))
    return PoincareSample(checks, tuple(bad), worst, params, seed)


def sample_points(g: MetricGraph, count: int, seed: int) -> list[PointRef]:
    """Seeded interior edge points at sixteenths of the edge length."""
    rng = random.Random(seed)
    edges = sorted(g.edges, key=lambda e: e.id)
    out = []
    for _ in range(count):
        e = rng.choice(edges)
        out.append(PointRef(edge=e.id, t=e.length * Fraction(rng.randint(1, 15), 16)))
    return out


def sample_balls(g: MetricGraph, count: int, seed: int, anchor: Optional[PointRef] = None) -> list[BallSpec]:
    """Seeded balls with dyadic radii ``2^-2 .. 2^-12``.

    With an ``anchor``, every other ball is forced to contain it.
    """
    rng = random.Random(seed)
    pts = sample_points(g, count, seed + 1)
    out = []
    for i, c in enumerate(pts):
        r = Fraction(1, 2 ** rng.randint(2, 12))
        if anchor is not None and i % 2 == 0:
            if i % 4 == 0:
                c = anchor
            else:
                d = geodesic_distance(g, anchor, c) if g.metric == GEODESIC else None
                if d:
                    r = max(r, _dyadic_above(d))
        out.append(BallSpec(c, r))
    return out


def _dyadic_above(x: Number) -> Fraction:
    """Smallest power of two strictly above ``x > 0``."""
    r = Fraction(1)
    while r / 2 > x:
        r /= 2
    while r <= x:
        r *= 2
    return r


# ---------------------------------------------------------------------------
# measure-theoretic boundary


@dataclass(frozen=True)
class MtbRecord:
    point: PointRef
    e_density: Number
    complement_density: Number
    in_boundary: bool
    radii: tuple[Number, ...]

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "upper_density_E": to_json_number(self.e_density),
            "upper_density_complement": to_json_number(self.complement_density),
            "in_boundary": self.in_boundary,
            "radii": _num_list(self.radii),
        }


def _segment_gap(g: MetricGraph, p: PointRef) -> Number:
    """Ambient distance from ``p`` to the nearest edge not through ``p``."""
    px, py = (float(c) for c in g.coords(p))
    own = {eid for eid, _ in g.directions_at(p)}
    best = math.inf
    for e in g.edges:
        if e.id in own:
            continue
        x0, y0 = (float(c) for c in g.coords(PointRef(vertex=e.u)))
        x1, y1 = (float(c) for c in g.coords(PointRef(vertex=e.v)))
        dx, dy = x1 - x0, y1 - y0
        s = ((px - x0) * dx + (py - y0) * dy) / (dx * dx + dy * dy)
        s = min(1.0, max(0.0, s))
        best = min(best, math.hypot(x0 + s * dx - px, y0 + s * dy - py))
    return best


def germ_scale(g: MetricGraph, f: PiecewiseLinearFn, p: PointRef) -> Number:
    """Distance from ``p`` to the nearest other critical point of ``f`` along any germ."""
    best = None
    for eid, direction in g.directions_at(p):
        e = g.edge(eid)
        offs = f.critical_offsets(g, eid)
        if p.vertex is not None:
            t = Fraction(0) if direction == BACKWARD else e.length
        else:
            t = p.t
        if direction == BACKWARD:
            ahead = [s - t for s in offs if s > t]
        else:
            ahead = [t - s for s in offs if s < t]
        span = min(ahead) if ahead else e.length
        best = span if best is None else min(best, span)
    return best


def default_radii(g: MetricGraph, f: PiecewiseLinearFn, p: PointRef, halvings: int = 12) -> tuple[Number, ...]:
    """Dyadic grid starting below the local segment scale (and the ambient gap to other edges)."""
    scale = germ_scale(g, f, p)
    if g.metric == AMBIENT:
        gap = _segment_gap(g, p)
        if gap < scale:
            scale = Fraction(gap).limit_denominator(2**62) if gap > 0 else scale
    return dyadic_radii(_dyadic_below(scale), halvings)


def _dyadic_below(x: Number) -> Fraction:
    r = Fraction(1)
    while r >= x:
        r /= 2
    while 2 * r < x:
        r *= 2
    return r


def mtb_scan(
    g: MetricGraph,
    E: EdgeSubset,
    candidates: Sequence[PointRef],
    radii: Optional[Sequence[Number]] = None,
    threshold: Number = MTB_THRESHOLD,
    block: int = STABLE_BLOCK,
) -> list[MtbRecord]:
    """Upper densities of ``E`` and its complement over the smallest radius block."""
    chi = indicator_function(g, E)
    out = []
    for p in sorted(set(candidates), key=PointRef.sort_key):
        grid = _check_radii(radii) if radii is not None else default_radii(g, chi, p)
        dens_e, dens_c = None, None
        for r in grid[-block:]:
            ball = ball_subset(g, p, r)
            mass = h1_of_subset(g, ball)
            inside = h1_of_subset(g, ball.intersection(E))
            de, dc = inside / mass, (mass - inside) / mass
            dens_e = de if dens_e is None else max(dens_e, de)
            dens_c = dc if dens_c is None else max(dens_c, dc)
        out.append(MtbRecord(p, dens_e, dens_c, dens_e > threshold and dens_c > threshold, grid))
    return out


def boundary_candidates(g: MetricGraph, E: EdgeSubset, samples: int = 16, seed: int = 0) -> list[PointRef]:
    """Curve-boundary points plus seeded edge samples and seeded vertices."""
    pts = set(curve_boundary(g, E).points)
    pts.update(sample_points(g, samples, seed))
    rng = random.Random(seed)
    vids = sorted(v.id for v in g.vertices)
    pts.update(PointRef(vertex=v) for v in rng.sample(vids, min(samples, len(vids))))
    return sorted(pts, key=PointRef.sort_key)


# ---------------------------------------------------------------------------
# quasiconvexity


@dataclass(frozen=True)
class QuasiconvexityWitness:
    max_ratio: float
    pair: tuple[PointRef, PointRef]
    pairs_checked: int

    def to_json(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "pair": [p.to_json() for p in self.pair],
            "pairs_checked": self.pairs_checked,
        }


def _angle(g: MetricGraph, vid: int, eid: int) -> float:
    e = g.edge(eid)
    other = e.v if e.u == vid else e.u
    (x0, y0), (x1, y1) = g.coords(PointRef(vertex=vid)), g.coords(PointRef(vertex=other))
    return math.atan2(float(y1 - y0), float(x1 - x0))


def quasiconvexity_witness(g: MetricGraph) -> QuasiconvexityWitness:
    """max geodesic/ambient distance ratio over pairs on angularly adjacent edges.

    At each vertex, incident edges are sorted by angle and each consecutive
    pair contributes the two points at half the shorter edge length.
    """
    best = None
    checked = 0
    for v in g.vertices:
        inc = sorted(g.incident(v.id), key=lambda item: _angle(g, v.id, item[0]))
        if len(inc) < 2:
            continue
        pairs = list(zip(inc, inc[1:] + inc[:1])) if len(inc) > 2 else [(inc[0], inc[1])]
        for (ea, da), (eb, db) in pairs:
            s = min(g.edge(ea).length, g.edge(eb).length) / 2
            a = PointRef(edge=ea, t=s if da == BACKWARD else g.edge(ea).length - s)
            b = PointRef(edge=eb, t=s if db == BACKWARD else g.edge(eb).length - s)
            (xa, ya), (xb, yb) = g.coords(a), g.coords(b)
            amb = math.hypot(float(xa - xb), float(ya - yb))
            # any curve must leave each edge through an end at least s away, so the path
            # through the shared vertex is a geodesic
            geo = float(2 * s)
            checked += 1
            ratio = geo / amb if amb > 0 else math.inf
            if best is None or ratio > best[0]:
                best = (ratio, (a, b))
    if best is None:
        raise ValueError("no vertex of degree two or more")
    return QuasiconvexityWitness(best[0], best[1], checked)


# ---------------------------------------------------------------------------
# Federer report


@dataclass(frozen=True)
class HypothesisVerdict:
    holds: bool
    label: str
    detail: str

    def to_json(self) -> dict:
        return {"holds": self.holds, "label": self.label, "detail": self.detail}


@dataclass(frozen=True)
class FedererReport:
    boundary: tuple[MtbRecord, ...]
    content: Number
    content_method: str
    tv_lower: Number
    tv_upper: Number
    doubling: DoublingReport
    doubling_verdict: HypothesisVerdict
    poincare: PoincareSample
    poincare_verdict: HypothesisVerdict
    densities: tuple[DensityProfile, ...]
    c0_scan: tuple[dict, ...]
    verdicts: tuple[str, ...]
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def summary(self) -> str:
        return self.verdicts[0]

    def to_json(self) -> dict:
        return {
            "boundary": [r.to_json() for r in self.boundary if r.in_boundary],
            "candidates_scanned": len(self.boundary),
            "threshold": to_json_number(MTB_THRESHOLD),
            "content": {"value": to_json_number(self.content), "method": self.content_method},
            "tv_bracket": {"lower": to_json_number(self.tv_lower), "upper": to_json_number(self.tv_upper)},
            "doubling": dict(self.doubling.to_json(), verdict=self.doubling_verdict.to_json()),
            "poincare": dict(self.poincare.to_json(), verdict=self.poincare_verdict.to_json()),
            "densities": [d.to_json() for d in self.densities],
            "c0_scan": list(self.c0_scan),
            "verdicts": list(self.verdicts),
            "seed": self.seed,
            **self.extra,
        }


def _fmt(x: Number) -> str:
    v = to_json_number(x)
    return str(v) if not isinstance(v, float) else f"{v:.6g}"


def federer_report(
    g: MetricGraph,
    E: EdgeSubset,
    c0_scan: Sequence[Number] = (),
    radii: Optional[Sequence[Number]] = None,
    seed: int = 0,
    params: PoincareParams = PoincareParams(),
    balls: int = 4,
    per_ball: int = 16,
    doubling_centers: Optional[Sequence[PointRef]] = None,
    doubling_radii: Optional[Sequence[Number]] = None,
    doubling_evidence: Optional[HypothesisVerdict] = None,
    doubling_report: Optional[DoublingReport] = None,
    poincare_evidence: Optional[HypothesisVerdict] = None,
    cap_segments: Optional[int] = None,
    content_method: str = "centered",
) -> FedererReport:
    """Compare the codimension-one measure of the boundary with the total-variation bracket.

    ``doubling_evidence`` and ``poincare_evidence`` override the verdicts drawn
    from the finite samples, for callers holding growth evidence across sizes.
    """
    candidates = boundary_candidates(g, E, seed=seed)
    records = tuple(mtb_scan(g, E, candidates, radii))
    boundary_pts = [r.point for r in records if r.in_boundary]
    content_radii = tuple(radii) if radii is not None else None
    if boundary_pts:
        grids = {p: (content_radii or default_radii(g, indicator_function(g, E), p)) for p in boundary_pts}
        content = sum(
            (codim1_content(g, [p], grids[p], method=content_method).value for p in boundary_pts), Fraction(0)
        )
    else:
        content = Fraction(0)

    chi = good_representative(g, indicator_function(g, E))
    tv = tv_bracket(g, chi, cap_segments=cap_segments)

    curve_pts = curve_boundary(g, E).points
    dens = tuple(density_liminf(g, p, content_radii or default_radii(g, chi, p)) for p in curve_pts)

    if doubling_centers is None:
        doubling_centers = list(curve_pts) + sample_points(g, 8, seed + 2)
    if doubling_radii is None:
        longest = max(e.length for e in g.edges)
        doubling_radii = dyadic_radii(_dyadic_below(longest), 10)
    dbl = doubling_report or doubling_scan(g, doubling_centers, doubling_radii, exact=len(g.edges) <= EXACT_EDGE_LIMIT)
    dbl_verdict = doubling_evidence or HypothesisVerdict(
        True, "doubling ok", f"finite graph; max sampled ratio {_fmt(dbl.max_ratio)}"
    )

    anchor = curve_pts[0] if curve_pts else None
    pc = poincare_sample(g, sample_balls(g, balls, seed + 3, anchor), params, seed + 4, per_ball)
    if poincare_evidence is not None:
        pc_verdict = poincare_evidence
    elif pc.ok:
        pc_verdict = HypothesisVerdict(True, "Poincaré sampled-ok", f"{pc.checks} checks, no violation")
    else:
        pc_verdict = HypothesisVerdict(False, "Poincaré violated", f"{len(pc.violations)} of {pc.checks} checks fail")

    scan = []
    for c0 in c0_scan:
        row = {"c0": to_json_number(c0), "density_bound_holds": all(d.min_ratio < c0 for d in dens)}
        try:
            row["perimeter_upper_bound"] = to_json_number(perimeter_upper_bound(g, E, c0).value)
        except DensityPreconditionError as exc:
            row["perimeter_upper_bound"] = None
            row["precondition"] = str(exc)
        scan.append(row)

    summary = ", ".join(
        [dbl_verdict.label, pc_verdict.label, f"H(∂*E)={_fmt(content)}", f"TV lower ≥ {_fmt(tv.lower)}"]
    )
    verdicts = [summary]
    if content == 0 and tv.lower > 0:
        verdicts.append(f"Federer characterization fails: ∂*E is empty while the TV lower bound is {_fmt(tv.lower)}")
        if not dbl_verdict.holds and pc_verdict.holds:
            verdicts.append("doubling is the essential hypothesis")
        elif dbl_verdict.holds and not pc_verdict.holds:
            verdicts.append("Poincaré is the essential hypothesis")
    else:
        verdicts.append(f"Federer consistent: H(∂*E)={_fmt(content)}, TV bracket [{_fmt(tv.lower)}, {_fmt(tv.upper)}]")
    verdicts.append(f"doubling: {dbl_verdict.detail}")
    verdicts.append(f"Poincaré: {pc_verdict.detail}")
    return FedererReport(
        records, content, content_method, tv.lower, tv.upper, dbl, dbl_verdict, pc, pc_verdict, dens,
        tuple(scan), tuple(verdicts), seed,
    )


def gallery_federer_report(depth: int, metric: str, seed: int = 0, c0_scan: Sequence[Number] = (), **kwargs) -> FedererReport:
    """Federer report on the star with growth evidence across depths ``2..depth``.

    Geodesic: the doubling ratio over the seeded grid must increase with depth
    (exact up to depth 6, float64 beyond).
    Ambient: doubling is checked against ``2^18`` and quasiconvexity must fail,
    the distance ratio reaching ``2^(J/2)``.
    """
    from .gallery import indicator_E, star_doubling_grid, star_space

    g = star_space(depth, metric)
    E = indicator_E(depth)
    centers, radii = star_doubling_grid(depth, seed)
    extra: dict = {}
    own = None
    if metric == GEODESIC:
        growth = []
        for j in range(2, max(depth, 3) + 1):
            cs, rs = star_doubling_grid(j, seed)
            gj = g if j == depth else star_space(j, GEODESIC)
            rep = doubling_scan(gj, cs, rs, exact=len(gj.edges) <= EXACT_EDGE_LIMIT)
            if j == depth:
                own = rep
            growth.append((j, rep.max_ratio))
        increasing = all(a[1] < b[1] for a, b in zip(growth, growth[1:]))
        detail = "max ratio by depth " + ", ".join(f"J={j}: {_fmt(q)}" for j, q in growth)
        dbl = HypothesisVerdict(not increasing, "doubling fails" if increasing else "doubling ok", detail)
        pcv = None
        extra["doubling_growth"] = [{"J": j, "max_ratio": to_json_number(q)} for j, q in growth]
    else:
        rep = own = doubling_scan(g, centers, radii, exact=len(g.edges) <= EXACT_EDGE_LIMIT)
        ok = rep.max_ratio <= DOUBLING_BOUND
        dbl = HypothesisVerdict(
            ok, "doubling ok" if ok else "doubling fails", f"max ratio {_fmt(rep.max_ratio)} vs bound 2^18"
        )
        qc = quasiconvexity_witness(g)
        fails = qc.max_ratio >= 2 ** (depth / 2)
        pcv = HypothesisVerdict(
            not fails,
            "Poincaré fails" if fails else "Poincaré sampled-ok",
            f"geodesic/ambient distance ratio {qc.max_ratio:.6g} vs 2^(J/2) = {2 ** (depth / 2):.6g}",
        )
        extra["quasiconvexity"] = qc.to_json()
    report = federer_report(
        g, E, c0_scan, seed=seed, doubling_centers=centers, doubling_radii=radii,
        doubling_evidence=dbl, doubling_report=own, poincare_evidence=pcv, **kwargs,
    )
    extra["gallery"] = {"depth": depth, "metric": metric}
    return FedererReport(**{**report.__dict__, "extra": extra})
