import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapes import F, HALF, identity_fn, one_leg, step_fn, three_star, unit_interval, upper_half, zigzag

from bvgraph.calculus import (
    DensityPreconditionError,
    classical_variation_interval,
    classical_variation_samples,
    coarea_sweep,
    curve_boundary,
    perimeter_upper_bound,
    smooth_jumps,
    tv_bracket,
)
from bvgraph.gallery import indicator_E, random_instance, random_instance_detailed, star_space
from bvgraph.graph import EdgeSubset, PointRef, indicator_function
from bvgraph.variation import discontinuity_points, good_representative, pointwise_variation, var_total

ORIGIN = PointRef(vertex=0)


def star_chi(J):
    g = star_space(J)
    return g, good_representative(g, indicator_function(g, indicator_E(J)))


# -- curve boundary and perimeter ------------------------------------------


def test_curve_boundary_examples():
    assert curve_boundary(unit_interval(), upper_half()).points == (PointRef(edge=0, t=HALF),)
    assert curve_boundary(three_star(), one_leg()).points == (ORIGIN,)
    for J in (1, 2, 3):
        assert curve_boundary(star_space(J), indicator_E(J)).points == (ORIGIN,)


def test_curve_boundary_ignores_isolated_points():
    # membership of a lone vertex is a null modification and is canonicalised away
    E = EdgeSubset.build({}, [1])
    assert curve_boundary(unit_interval(), E).count == 0


def test_perimeter_bound_examples():
    assert perimeter_upper_bound(unit_interval(), upper_half(), 3).value == 2
    assert perimeter_upper_bound(three_star(), one_leg(), 4).value == 3
    for J in (2, 3, 4):
        assert perimeter_upper_bound(star_space(J), indicator_E(J), 2 ** (J + 2)).value == 2 ** (J + 1)


def test_perimeter_bound_precondition():
    with pytest.raises(DensityPreconditionError) as info:
        perimeter_upper_bound(star_space(3), indicator_E(3), 4)
    assert info.value.best_ratio == 16 and info.value.point == ORIGIN
    with pytest.raises(DensityPreconditionError):
        perimeter_upper_bound(three_star(), one_leg(), 3)


def _random_set(g, seed):
    import random

    rng = random.Random(seed)
    ivs = {}
    for e in g.edges:
        cuts = sorted({e.length * F(rng.randint(0, 8), 8) for _ in range(3)})
        pairs = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if a < b]
        if pairs:
            ivs[e.id] = pairs
    members = [v.id for v in g.vertices if rng.random() < 0.5]
    return EdgeSubset.build(ivs, members)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_perimeter_and_curve_boundary_bounds(seed):
    g, _ = random_instance(seed, edges=1 + seed % 6)
    E = _random_set(g, seed)
    c0 = max(g.max_degree(), 2) + 1  # interior points have ratio 2
    n = curve_boundary(g, E).count
    chi = indicator_function(g, E)
    assert n <= var_total(g, chi)
    assert perimeter_upper_bound(g, E, c0).value <= c0 * n
    for p in curve_boundary(g, E).points:
        assert p in discontinuity_points(g, good_representative(g, chi))


# -- bracket -----------------------------------------------------------------


def test_bracket_examples():
    g = unit_interval()
    assert (tv_bracket(g, identity_fn()).lower, tv_bracket(g, identity_fn()).upper) == (1, 1)
    step = tv_bracket(g, step_fn(override=5))
    assert (step.lower, step.upper) == (1, 1)


@pytest.mark.parametrize("J", range(1, 5))
def test_bracket_on_gallery_collapses_at_2J(J):
    g, chi = star_chi(J)
    br = tv_bracket(g, chi)
    assert (br.var_value, br.iv_value, br.lower, br.upper) == (1, 2 * J, 2 * J, 2 * J)
    (cost,) = br.jump_costs
    assert cost.point == ORIGIN and cost.centre == 0 and cost.cost == 2 * J
    assert br.lower / var_total(g, chi) == 2 * J


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_bracket_is_ordered(seed):
    kind = ("tree", "graph")[seed % 2]
    g, f = random_instance(seed, edges=2 + seed % 4, kind=kind, max_pieces=2)
    br = tv_bracket(g, f)
    assert var_total(g, f) <= br.lower <= br.upper


# -- coarea ------------------------------------------------------------------


def test_coarea_examples():
    sweep = coarea_sweep(unit_interval(), identity_fn())
    assert sweep.var_levels == (1,) and sweep.integral == 1
    g, f = zigzag()
    sweep = coarea_sweep(g, f)
    assert sweep.thresholds == (HALF,) and sweep.var_levels == (3,) and sweep.integral == 3
    g, chi = star_chi(3)
    sweep = coarea_sweep(g, chi)
    assert sweep.var_levels == (1,) and sweep.integral == 1


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_coarea_inequality_where_smoothing_succeeds(seed):
    g, f = random_instance(seed, edges=1 + seed % 4, max_pieces=2)
    c0 = g.max_degree()
    try:
        smooth_jumps(g, f, F(1, 10), c0)
    except DensityPreconditionError:
        return
    assert coarea_sweep(g, f).integral <= (3 + 4 * c0) * var_total(g, f)


# -- one-dimensional oracle --------------------------------------------------


def test_classical_examples():
    assert classical_variation_interval(unit_interval(), identity_fn()) == 1
    assert classical_variation_interval(*zigzag()) == 3
    assert classical_variation_interval(unit_interval(), indicator_function(unit_interval(), upper_half())) == 1
    assert classical_variation_samples([F(0), F(1), F(0), F(1)]) == 3


def test_classical_rejects_non_paths():
    with pytest.raises(ValueError):
        classical_variation_interval(three_star(), identity_fn())


def _partition_supremum(g, f):
    # dense partition including both one-sided limits at each breakpoint
    values = []
    for eid in range(len(g.edges)):
        for piece in f.pieces[eid]:
            values += [piece.v0, piece.v1]
    return classical_variation_samples(values)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_path_oracles_agree(seed):
    g, f = random_instance(seed, edges=1 + seed % 5, kind="path")
    classical = classical_variation_interval(g, f)
    assert var_total(g, f) == classical == _partition_supremum(g, f)
    assert coarea_sweep(g, f).integral == classical


# -- smoothing ---------------------------------------------------------------


def test_smoothing_continuous_is_identity():
    g = unit_interval()
    out = smooth_jumps(g, identity_fn(), F(1, 10), 3)
    assert out.fn == identity_fn() and out.pv_value == 1 and out.steps == ()


def test_smoothing_step():
    g = unit_interval()
    out = smooth_jumps(g, step_fn(), F(1, 10), 3)
    assert discontinuity_points(g, out.fn) == []
    assert out.pv_value == 1 and out.certified
    (step,) = out.steps
    assert 4 * step.radius <= F(1, 10) and out.mass < F(1, 10)
    # outside the ramp the function is untouched
    for t in (F(1, 10), F(9, 10)):
        p = PointRef(edge=0, t=t)
        assert out.fn.value(g, p) == step_fn().value(g, p)


def test_smoothing_gallery_indicator():
    g, chi = star_chi(2)
    out = smooth_jumps(g, chi, F(1, 10), 8)
    assert out.fn.is_curve_continuous(g)
    assert out.pv_value <= (3 + 4 * 8) * 1 and out.certified


def test_smoothing_precondition():
    g, chi = star_chi(3)
    with pytest.raises(DensityPreconditionError):
        smooth_jumps(g, chi, F(1, 10), 4)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_smoothing_bound(seed):
    inst = random_instance_detailed(seed, edges=1 + seed % 5, max_pieces=2)
    g, f = inst.graph, inst.fn
    c0 = g.max_degree()
    out = smooth_jumps(g, f, F(1, 10), c0)
    assert out.fn.is_curve_continuous(g)
    assert out.pv_value <= (3 + 4 * c0) * var_total(g, f)
    assert out.mass < F(1, 10)
    assert pointwise_variation(g, out.fn) == out.pv_value


def test_smoothing_rejects_bad_parameters():
    with pytest.raises(ValueError):
        smooth_jumps(unit_interval(), step_fn(), 0, 3)
