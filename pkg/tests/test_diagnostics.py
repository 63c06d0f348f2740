import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapes import F, HALF, identity_fn, one_leg, step_fn, three_star, unit_interval, upper_half

from bvgraph.calculus import curve_boundary
from bvgraph.diagnostics import (
    MTB_THRESHOLD,
    PoincareParams,
    boundary_candidates,
    default_radii,
    density_liminf,
    doubling_scan,
    federer_report,
    mtb_scan,
    poincare_check,
    poincare_sample,
    quasiconvexity_witness,
    sample_balls,
)
from bvgraph.functions import scale
from bvgraph.gallery import indicator_E, random_function, random_instance, star_space
from bvgraph.graph import AMBIENT, GEODESIC, EdgeSubset, PiecewiseLinearFn, Piece, PointRef, constant_function
from bvgraph.measure import BallSpec, ball_subset, dyadic_radii

ORIGIN = PointRef(vertex=0)


# -- density -----------------------------------------------------------------


def test_density_examples():
    radii = dyadic_radii(F(1, 4), 8)
    mid = density_liminf(unit_interval(), PointRef(edge=0, t=HALF), radii)
    assert mid.limit_ratio == 2 and mid.stabilized
    hub = density_liminf(three_star(), ORIGIN, radii)
    assert hub.limit_ratio == 3 and hub.stabilized
    assert [r for r, _ in hub.samples] == list(radii)


@pytest.mark.parametrize("J", [2, 3, 5])
def test_origin_density_on_the_star(J):
    g = star_space(J)
    radii = [F(1, 2 ** (2 * k + 1)) for k in range(1, J + 3)]
    prof = density_liminf(g, ORIGIN, radii)
    assert prof.limit_ratio == 2 ** (J + 1)
    for k in range(1, J):
        r = F(1, 2 ** (2 * k + 1))
        # caps: full rays of levels > k, r on the others
        closed = sum((min(r, e.length) for e in g.edges), F(0)) / r
        assert dict(prof.samples)[r] == closed
        assert closed <= 3 * 2**k


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), pick=st.integers(0, 1000))
def test_density_stabilises_to_degree(seed, pick):
    g, f = random_instance(seed, edges=1 + seed % 6)
    pts = f.critical_points(g)
    p = pts[pick % len(pts)]
    prof = density_liminf(g, p, default_radii(g, f, p))
    assert prof.stabilized
    assert prof.limit_ratio == (g.degree(p.vertex) if p.vertex is not None else 2)


# -- doubling ----------------------------------------------------------------


def test_doubling_unit_interval():
    pts = [PointRef(edge=0, t=F(k, 8)) for k in range(1, 8)] + [ORIGIN]
    assert doubling_scan(unit_interval(), pts, dyadic_radii(F(1), 8)).max_ratio <= 2


@settings(max_examples=60, deadline=None)
@given(length=st.integers(1, 64), k=st.integers(0, 16), m=st.integers(-3, 12))
def test_doubling_on_single_edges_is_at_most_two(length, k, m):
    g, _ = random_instance(0, edges=1)
    from bvgraph.graph import Edge, MetricGraph

    g = MetricGraph(g.vertices, (Edge(0, 0, 1, F(length, 8)),))
    x = g.point(0, F(length, 8) * F(k, 16))
    assert doubling_scan(g, [x], [F(1, 2**m) if m >= 0 else F(2**-m)]).max_ratio <= 2


def test_doubling_grows_on_the_geodesic_star():
    from bvgraph.gallery import star_doubling_grid

    growth = []
    for J in range(2, 6):
        cs, rs = star_doubling_grid(J)
        growth.append(doubling_scan(star_space(J), cs, rs).max_ratio)
    assert growth == sorted(growth) and len(set(growth)) == len(growth)
    assert growth[:3] == [F(11, 3), F(9), F(233, 15)]


def test_doubling_zero_ball_is_an_error():
    with pytest.raises(ValueError):
        doubling_scan(unit_interval(), [], [F(1)])


# -- Poincaré ------------------------------------------------------------------


def quadrature_lhs(g, ball, u, n=4000):
    """Midpoint-rule mean oscillation of ``u`` over the ball."""
    xs, ws, ys = [], [], []
    for eid, ivs in ball_subset(g, ball).intervals.items():
        for a, b in ivs:
            a, b = float(a), float(b)
            t = a + (np.arange(n) + 0.5) * (b - a) / n
            knots = [float(p.t0) for p in u.pieces[eid]] + [float(u.pieces[eid][-1].t1)]
            vals = [float(p.v0) for p in u.pieces[eid]] + [float(u.pieces[eid][-1].v1)]
            ys.append(np.interp(t, knots, vals))
            ws.append(np.full(n, (b - a) / n))
            xs.append(t)
    y, w = np.concatenate(ys), np.concatenate(ws)
    mean = float(np.sum(y * w) / np.sum(w))
    return float(np.sum(np.abs(y - mean) * w) / np.sum(w))


def test_poincare_unit_interval_closed_form():
    res = poincare_check(unit_interval(), BallSpec(PointRef(edge=0, t=HALF), F(1, 4)), identity_fn(), PoincareParams(1, 1, 1))
    # mean |t - 1/2| over (1/4, 3/4) is 1/8; gradient mean 1
    assert (res.lhs, res.rhs, res.ok, res.mean) == (F(1, 8), F(1, 4), True, HALF)


def test_poincare_constant_function():
    g = star_space(3)
    res = poincare_check(g, BallSpec(ORIGIN, F(1, 16)), constant_function(g, F(3)), PoincareParams())
    assert res.lhs == 0 and res.ok


def test_poincare_rejects_discontinuous_functions():
    with pytest.raises(ValueError, match="upper gradient not representable"):
        poincare_check(unit_interval(), BallSpec(PointRef(edge=0, t=HALF), F(1, 4)), step_fn(), PoincareParams())


def test_poincare_params_validation():
    for bad in (dict(p=F(1, 2)), dict(C=0), dict(lam=F(1, 2))):
        with pytest.raises(ValueError):
            PoincareParams(**bad)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), a=st.integers(-8, 8))
def test_poincare_scales_linearly(seed, a):
    g = star_space(3)
    ball = sample_balls(g, 1, seed, anchor=None)[0]
    u = random_function(g, seed)
    base = poincare_check(g, ball, u, PoincareParams())
    scaled = poincare_check(g, ball, scale(u, F(a)), PoincareParams())
    assert scaled.lhs == abs(a) * base.lhs and scaled.rhs == abs(a) * base.rhs
    if a != 0:
        assert scaled.ok == base.ok


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_poincare_lhs_matches_quadrature(seed):
    g = star_space(3)
    ball = sample_balls(g, 2, seed, anchor=ORIGIN)[seed % 2]
    u = random_function(g, seed)
    res = poincare_check(g, ball, u, PoincareParams())
    assert float(res.lhs) == pytest.approx(quadrature_lhs(g, ball, u), rel=1e-3, abs=1e-9)


def test_poincare_non_unit_exponent():
    res = poincare_check(unit_interval(), BallSpec(PointRef(edge=0, t=HALF), F(1, 4)), identity_fn(), PoincareParams(2, 1, 1))
    assert float(res.rhs) == pytest.approx(0.25) and res.ok


def test_poincare_sampled_on_small_star():
    g = star_space(3)
    res = poincare_sample(g, sample_balls(g, 4, 0, anchor=ORIGIN), PoincareParams(1, 4, 3), seed=0, per_ball=8)
    assert res.checks == 32 and res.ok


def ramp_on_level_one_ray(g):
    """Arc length along edge 0 (a level-1 ray), zero on every other edge."""
    pieces = {e.id: (Piece(F(0), e.length, F(0), F(0)),) for e in g.edges}
    pieces[0] = (Piece(F(0), F(1, 8), F(0), F(1, 8)),)
    vvals = {v.id: F(0) for v in g.vertices}
    vvals[1] = F(1, 8)
    return PiecewiseLinearFn(pieces, vvals)


@pytest.mark.parametrize("m, eps, ratio", [(10, F(1, 8), 1.083), (10, F(1, 64), 3.14), (13, F(1, 64), 6.81)])
def test_poincare_constants_refuted_near_the_origin(m, eps, ratio):
    # a ball centred on a ray at distance d from the origin with radius just above d
    # holds a tiny linear part and 2^7 short rays at the origin; the oscillation
    # comes from the ramp while the gradient average is diluted by the star
    g = star_space(6)
    u = ramp_on_level_one_ray(g)
    d = F(1, 2**m)
    ball = BallSpec(PointRef(edge=0, t=d), d * (1 + eps))
    res = poincare_check(g, ball, u, PoincareParams(1, 4, 3))
    assert not res.ok
    assert float(res.lhs / res.rhs) == pytest.approx(ratio, rel=1e-3)
    assert float(res.lhs) == pytest.approx(quadrature_lhs(g, ball, u), rel=1e-3)


# -- measure-theoretic boundary ------------------------------------------------


def test_mtb_unit_interval():
    g = unit_interval()
    half, inside = PointRef(edge=0, t=HALF), PointRef(edge=0, t=F(3, 4))
    recs = {r.point: r for r in mtb_scan(g, upper_half(), [half, inside])}
    assert recs[half].e_density == HALF == recs[half].complement_density and recs[half].in_boundary
    assert recs[inside].complement_density == 0 and not recs[inside].in_boundary


def test_mtb_three_star_leg():
    (rec,) = mtb_scan(three_star(), one_leg(), [ORIGIN])
    assert rec.e_density == F(1, 3) and rec.in_boundary


@pytest.mark.parametrize("J, inside", [(3, True), (9, True), (10, False)])
def test_origin_density_of_gallery_set(J, inside):
    # E takes 2J of the 2^(J+1) rays at small radii
    g = star_space(J)
    (rec,) = mtb_scan(g, indicator_E(J), [ORIGIN])
    assert rec.e_density == F(2 * J, 2 ** (J + 1))
    assert rec.in_boundary == inside
    assert (rec.e_density > MTB_THRESHOLD) == inside


def _random_set(g, seed):
    rng = random.Random(seed)
    ivs = {}
    for e in g.edges:
        cuts = sorted({e.length * F(rng.randint(0, 8), 8) for _ in range(3)})
        pairs = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if a < b]
        if pairs:
            ivs[e.id] = pairs
    return EdgeSubset.build(ivs, [v.id for v in g.vertices if rng.random() < 0.5])


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_mtb_is_inside_curve_boundary(seed):
    g, _ = random_instance(seed, edges=1 + seed % 6)
    E = _random_set(g, seed)
    recs = mtb_scan(g, E, boundary_candidates(g, E, seed=seed))
    assert {r.point for r in recs if r.in_boundary} <= set(curve_boundary(g, E).points)


# -- quasiconvexity --------------------------------------------------------------


@pytest.mark.parametrize("J", range(2, 9))
def test_quasiconvexity_fails_on_the_ambient_star(J):
    w = quasiconvexity_witness(star_space(J, AMBIENT))
    assert w.max_ratio >= 2 ** (J / 2)
    # the pair lies on the two rays meeting at angle pi/2^J
    assert w.max_ratio == pytest.approx(1 / math.sin(math.pi / 2 ** (J + 1)), rel=1e-9)


# -- Federer reports ---------------------------------------------------------------


def test_federer_unit_interval():
    rep = federer_report(unit_interval(), upper_half())
    assert rep.content == 2 and (rep.tv_lower, rep.tv_upper) == (1, 1)
    assert "Federer consistent: H(∂*E)=2, TV bracket [1, 1]" in rep.verdicts


def test_federer_small_star_keeps_the_origin_in_the_boundary():
    # at depth 3 the origin still carries E-density 3/8, so ∂*E is {origin}
    from bvgraph.diagnostics import gallery_federer_report

    rep = gallery_federer_report(3, GEODESIC)
    assert rep.summary == "doubling fails, Poincaré sampled-ok, H(∂*E)=16, TV lower ≥ 6"
    assert rep.extra["gallery"] == {"depth": 3, "metric": GEODESIC}


def test_federer_report_json_carries_provenance():
    rep = federer_report(unit_interval(), upper_half(), c0_scan=[3], seed=5)
    data = rep.to_json()
    assert data["seed"] == 5 and data["threshold"] == "1/100"
    assert data["c0_scan"][0]["perimeter_upper_bound"] == 2
    assert data["poincare"]["note"].startswith("passes are sampled evidence")
    assert Fraction(data["content"]["value"]) == 2
