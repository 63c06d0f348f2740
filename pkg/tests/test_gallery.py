import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapes import F

from bvgraph.gallery import (
    MAX_DEPTH,
    StarSpaceSpec,
    e_lines,
    first_level,
    indicator_E,
    parse_gallery,
    random_function,
    random_instance,
    random_instance_detailed,
    ray_length,
    star_h1_closed_form,
    star_space,
)
from bvgraph.graph import AMBIENT, GEODESIC, PointRef, distance, validate_function, validate_graph
from bvgraph.measure import h1_of_subset, h1_total

ORIGIN = PointRef(vertex=0)


def test_depth_one_is_four_rays_of_an_eighth():
    g = star_space(1)
    assert [e.length for e in g.edges] == [F(1, 8)] * 4
    assert g.degree(0) == 4


def test_depth_two_ray_lengths():
    lengths = Counter(e.length for e in star_space(2).edges)
    assert lengths == {F(1, 8): 4, F(1, 32): 4}


@pytest.mark.parametrize("J", range(1, 8))
def test_star_structure(J):
    g = star_space(J)
    assert g.degree(0) == 2 ** (J + 1) == len(g.edges)
    assert all(g.degree(v.id) == 1 for v in g.vertices if v.id != 0)
    # level j contributes 2^(j-1) new lines (one line at level 1), each two rays
    levels = Counter(first_level(k, J) for k in range(2**J))
    assert levels == {1: 2, **{j: 2 ** (j - 1) for j in range(2, J + 1)}}
    assert h1_total(g) == sum(2 * ray_length(first_level(k, J)) for k in range(2**J)) == star_h1_closed_form(J)


def test_ambient_rays_meet_only_at_the_origin():
    g = star_space(4, AMBIENT)
    assert validate_graph(g).ok
    tips = [v for v in g.vertices if v.id != 0]
    angles = {round(math.atan2(float(v.y), float(v.x)), 12) for v in tips}
    assert len(angles) == len(tips)
    for e in g.edges:
        tip = g.vertex(e.v)
        assert math.hypot(float(tip.x), float(tip.y)) == pytest.approx(float(e.length), rel=1e-12)


def test_ambient_tip_distance_across_the_origin():
    g = star_space(3, AMBIENT)
    # the two rays of line 0 point in opposite directions
    assert distance(g, PointRef(vertex=1), PointRef(vertex=2)) == F(1, 4)


def test_distinguished_set():
    assert e_lines(3) == [4, 2, 1]
    assert h1_of_subset(star_space(1), indicator_E(1)) == F(1, 4)
    assert h1_of_subset(star_space(3), indicator_E(3)) == F(21, 64)
    for J in range(1, 6):
        E = indicator_E(J)
        assert len(E.intervals) == 2 * J and 0 not in E.intervals
        assert h1_of_subset(star_space(J), E) == sum(2 * ray_length(j) for j in range(1, J + 1))


def test_spec_validation():
    with pytest.raises(ValueError):
        StarSpaceSpec(0)
    with pytest.raises(ValueError):
        StarSpaceSpec(MAX_DEPTH + 1)
    with pytest.raises(ValueError):
        StarSpaceSpec(2, "taxicab")


def test_parse_gallery():
    assert parse_gallery("star:J=3,metric=geodesic") == StarSpaceSpec(3, GEODESIC)
    assert parse_gallery("star:J=5,metric=ambient") == StarSpaceSpec(5, AMBIENT)
    assert parse_gallery("star:") == StarSpaceSpec(3)
    for bad in ("disk:J=2", "star:J=2,size=4", "star:J=0"):
        with pytest.raises(ValueError):
            parse_gallery(bad)


def test_single_edge_instance():
    inst = random_instance_detailed(0, edges=1)
    assert len(inst.graph.edges) == 1 and inst.graph.edges[0].length == 1
    assert inst.jump_vertices == ()


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), edges=st.integers(1, 8), kind=st.sampled_from(["tree", "path", "graph"]))
def test_random_instances_are_valid_and_deterministic(seed, edges, kind):
    inst = random_instance_detailed(seed, edges=edges, kind=kind)
    assert inst == random_instance_detailed(seed, edges=edges, kind=kind)
    assert validate_graph(inst.graph).ok
    validate_function(inst.graph, inst.fn)
    if kind == "path":
        assert inst.graph.max_degree() <= 2
    else:
        assert inst.graph.max_degree() <= 4
    for v in inst.jump_vertices:
        assert not inst.fn.is_continuous_at(inst.graph, PointRef(vertex=v))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_random_function_is_continuous_by_default(seed):
    g, _ = random_instance(seed, edges=5, kind="graph")
    f = random_function(g, seed)
    validate_function(g, f)
    assert f.is_curve_continuous(g)
    assert f == random_function(g, seed)
