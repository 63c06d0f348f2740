import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapes import F, HALF, path, three_star, unit_interval

from bvgraph.gallery import indicator_E, star_h1_closed_form, star_space
from bvgraph.graph import AMBIENT, GEODESIC, EdgeSubset, PointRef
from bvgraph.measure import (
    BallSpec,
    _ambient_trace,
    ball_measure,
    ball_measure_float,
    ball_subset,
    codim1_content,
    dyadic_radii,
    h1_of_subset,
    h1_total,
)

ORIGIN = PointRef(vertex=0)


def test_h1_total_path():
    assert h1_total(path([1, 1])) == 2


@pytest.mark.parametrize("J", range(1, 13))
def test_h1_total_star_closed_form(J):
    h = h1_total(star_space(J))
    assert h == star_h1_closed_form(J) == F(3, 4) - F(1, 2 ** (J + 1))
    assert h <= 1


def test_h1_total_star_monte_carlo_cover():
    # independent estimate: sample the plane, count grid cells touched by the rays
    J, n = 3, 256
    g = star_space(J, AMBIENT)
    cell = F(1, 4 * n)  # square of side 1/(4n) covering [-1/8, 1/8]^2 region
    touched = set()
    for e in g.edges:
        steps = int(e.length / cell) * 8
        for i in range(steps + 1):
            x, y = g.coords(g.point(e.id, e.length * F(i, steps))) if 0 < i < steps else g.coords(
                PointRef(vertex=e.u if i == 0 else e.v)
            )
            touched.add((math.floor(float(x) / float(cell)), math.floor(float(y) / float(cell))))
    # a curve of length L meets about L / cell cells (diagonals a bit more)
    estimate = len(touched) * float(cell)
    assert estimate == pytest.approx(float(h1_total(g)), rel=0.2)


def test_star_h1_limit_is_three_quarters():
    assert abs(float(h1_total(star_space(12))) - 0.75) < 2**-12


def test_h1_of_subset_examples():
    assert h1_of_subset(unit_interval(), EdgeSubset.full(unit_interval())) == 1
    assert h1_of_subset(star_space(3), indicator_E(3)) == F(21, 64)
    assert h1_of_subset(star_space(1), indicator_E(1)) == F(1, 4)


def test_ball_subset_unit_interval():
    s = ball_subset(unit_interval(), BallSpec(PointRef(edge=0, t=HALF), F(1, 5)))
    assert s.on(0) == ((F(3, 10), F(7, 10)),)


def test_ball_subset_three_star_hub():
    s = ball_subset(three_star(), BallSpec(PointRef(vertex=0), HALF))
    assert all(s.on(e) == ((F(0), HALF),) for e in range(3))


def test_ball_subset_geodesic_wraps_around_a_cycle():
    # triangle of unit sides; a ball at a vertex reaches both incident edges and not the far one
    from bvgraph.graph import Edge, MetricGraph, Vertex

    g = MetricGraph(tuple(Vertex(i) for i in range(3)), (Edge(0, 0, 1, F(1)), Edge(1, 1, 2, F(1)), Edge(2, 2, 0, F(1))))
    s = ball_subset(g, BallSpec(PointRef(edge=0, t=F(1, 4)), F(3, 2)))
    assert h1_of_subset(g, s) == 3  # the open ball misses only the antipode at distance 3/2
    s = ball_subset(g, BallSpec(PointRef(edge=0, t=F(1, 4)), F(1)))
    assert h1_of_subset(g, s) == 2


@pytest.mark.parametrize("J", [3, 5, 8])
def test_origin_balls_are_ray_caps_in_both_metrics(J):
    geo, amb = star_space(J, GEODESIC), star_space(J, AMBIENT)
    for k in range(1, J):
        r = F(1, 2 ** (2 * k + 1))
        caps = sum((min(r, e.length) for e in geo.edges), F(0))
        assert ball_measure(geo, ORIGIN, r) == caps
        assert float(ball_measure(amb, ORIGIN, r)) == pytest.approx(float(caps), rel=1e-12)


@pytest.mark.parametrize("J", [4, 6, 8, 10])
def test_origin_ball_bounds(J):
    g = star_space(J)
    for k in range(1, J - 1):
        m = ball_measure(g, ORIGIN, F(1, 2 ** (2 * k + 1)))
        assert F(1, 2**k) <= m <= F(2, 2**k)


def test_codim1_content_examples():
    radii = dyadic_radii(F(1, 4), 10)
    assert codim1_content(unit_interval(), [PointRef(edge=0, t=HALF)], radii).value == 2
    assert codim1_content(three_star(), [PointRef(vertex=0)], radii).value == 3
    assert codim1_content(unit_interval(), [], radii).value == 0


def test_codim1_content_cover_search_at_smallest_radii():
    # a ball centred at distance d from a degree-3 hub covers 3r - d; with the
    # centre grid at d = kr/16 the best is 33/16, tending to 2 as the grid refines
    radii = dyadic_radii(F(1, 4), 10)
    interior = PointRef(edge=0, t=HALF)
    assert codim1_content(unit_interval(), [interior], radii, method="cover").value == 2
    assert codim1_content(three_star(), [PointRef(vertex=0)], radii, method="cover").value == F(33, 16)
    two = [PointRef(edge=0, t=F(1, 4)), PointRef(edge=0, t=F(3, 4))]
    assert codim1_content(unit_interval(), two, radii, method="cover").value == 4


def test_codim1_content_rejects_increasing_radii():
    with pytest.raises(ValueError):
        codim1_content(unit_interval(), [ORIGIN], [F(1, 8), F(1, 4)])


def _random_subset(rng, g):
    ivs = {}
    for e in g.edges:
        cuts = sorted({e.length * F(rng.randint(0, 16), 16) for _ in range(4)})
        pairs = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if a < b]
        if pairs:
            ivs[e.id] = pairs
    return EdgeSubset.build(ivs)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_additivity_of_interval_unions(seed):
    rng = random.Random(seed)
    g = path([1, 2, F(3, 2)])
    s, t = _random_subset(rng, g), _random_subset(rng, g)
    lhs = h1_of_subset(g, s.union(t)) + h1_of_subset(g, s.intersection(t))
    assert lhs == h1_of_subset(g, s) + h1_of_subset(g, t)
    assert h1_of_subset(g, s) + h1_of_subset(g, s.complement(g)) == h1_total(g)


@settings(max_examples=40, deadline=None)
@given(J=st.integers(2, 5), edge=st.integers(0, 200), k=st.integers(1, 15), metric=st.sampled_from([GEODESIC, AMBIENT]))
def test_ball_measure_is_monotone_in_r(J, edge, k, metric):
    g = star_space(J, metric)
    e = g.edges[edge % len(g.edges)]
    x = PointRef(edge=e.id, t=e.length * F(k, 16))
    radii = [F(1, 2**m) for m in range(12, 0, -1)]
    values = [ball_measure(g, x, r) for r in radii]
    assert all(float(a) <= float(b) + 1e-15 for a, b in zip(values, values[1:]))
    assert float(values[-1]) <= float(h1_total(g)) + 1e-12


@settings(max_examples=40, deadline=None)
@given(J=st.integers(2, 6), edge=st.integers(0, 500), k=st.integers(1, 15), m=st.integers(3, 20))
def test_fast_ambient_measure_matches_trace(J, edge, k, m):
    g = star_space(J, AMBIENT)
    e = g.edges[edge % len(g.edges)]
    x = PointRef(edge=e.id, t=e.length * F(k, 16))
    r = F(1, 2**m)
    fast = float(ball_measure(g, x, r))
    traced = float(sum((b - a for ivs in _ambient_trace(g, x, r).values() for a, b in ivs), 0.0))
    assert fast == pytest.approx(traced, rel=1e-6, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(J=st.integers(2, 7), edge=st.integers(0, 500), k=st.integers(1, 15), m=st.integers(3, 20))
def test_float_geodesic_measure_matches_exact(J, edge, k, m):
    g = star_space(J, GEODESIC)
    e = g.edges[edge % len(g.edges)]
    x = PointRef(edge=e.id, t=e.length * F(k, 16))
    r = F(1, 2**m)
    assert ball_measure_float(g, x, r) == pytest.approx(float(ball_measure(g, x, r)), rel=1e-12)


def test_off_origin_measure_near_a_ray():
    # x on a level-1 ray at distance d from the origin; a small ball sees only its own ray
    g = star_space(4, AMBIENT)
    x = PointRef(edge=0, t=F(1, 16))
    assert float(ball_measure(g, x, F(1, 1024))) == pytest.approx(2 / 1024, rel=1e-12)
