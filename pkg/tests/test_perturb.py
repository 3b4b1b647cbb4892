from __future__ import annotations

import json
import math

import numpy as np
import pytest
from scipy.spatial import cKDTree
from hypothesis import given, settings, strategies as st

from knotapoly.perturb import (
    Certificate, CorridorTooNarrow, Infeasible, ShearFn, SliceBlocked, check_certificate,
    enumerate_critical_points, graph_polyline, plan_finite_avoidance, plan_slice_path,
    polyline_distance, slice_path_vertices,
)
from knotapoly.pillowcase import TWO_PI, wrap_angle

from conftest import abelian_line, pillowcase_of, synthetic_set

DELTA = TWO_PI / 360


def brute_force_margin(xy, g1, g2):
    """Pairwise torus max-distance between the two branches of T and S + (0, pi)."""
    best = math.inf
    for a in xy:
        th0 = a[0] + g1(a[1])
        for sign in (1, -1):
            t = np.array([sign * th0, sign * a[1] + g2(sign * th0)])
            for b in xy:
                u = np.array([b[0], b[1] + math.pi])
                d = np.abs(wrap_angle(t - u + math.pi) - math.pi)
                best = min(best, float(d.max()))
    return best


# ---------------------------------------------------------------------------
# shear functions
# ---------------------------------------------------------------------------

knot_lists = st.lists(st.tuples(st.floats(0.01, math.pi - 0.01), st.floats(-1.5, 1.5)), max_size=8)


@settings(max_examples=60, deadline=None)
@given(knot_lists, st.floats(-20, 20))
def test_shear_is_odd_and_periodic(knots, x):
    g = ShearFn(tuple(knots))
    assert g(0.0) == 0.0 and abs(g(math.pi)) < 1e-12
    assert abs(g(-x) + g(x)) < 1e-12
    assert abs(g(x + TWO_PI) - g(x)) < 1e-9
    assert abs((-g)(x) + g(x)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(knot_lists)
def test_shear_lipschitz_bounds_differences(knots):
    g = ShearFn(tuple(knots))
    xs = np.linspace(-7, 7, 2001)
    vs = g(xs)
    slopes = np.abs(np.diff(vs)) / np.diff(xs)
    assert slopes.max() <= g.lipschitz * (1 + 1e-9) + 1e-9
    assert ShearFn.from_json_obj(json.loads(json.dumps(g.to_json_obj()))) == g


def test_shear_validation():
    with pytest.raises(ValueError):
        ShearFn(((0.0, 1.0),))
    with pytest.raises(ValueError):
        ShearFn(((1.0, 2.0),), bound=1.0)
    with pytest.raises(ValueError):
        ShearFn.from_json_obj({"knots": [[1.0, 1.0]], "lipschitz": 0.1})
    g = ShearFn.sampled(lambda x: 0.3 * math.sin(2 * x))
    assert len(g.knots) == 65
    assert abs(g(1.0) - 0.3 * math.sin(2.0)) < 1e-3


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def test_certificate_abelian_line_has_margin_pi():
    g0 = ShearFn.zero()
    cert = check_certificate(abelian_line(), g0, g0, DELTA)
    assert abs(cert.margin - math.pi) < 1e-12
    assert cert.passed and cert.verdict == "pass"


def test_certificate_detects_coincidence():
    pts = [(1.0, math.pi / 2), (1.0, 3 * math.pi / 2)]
    g0 = ShearFn.zero()
    cert = check_certificate(pts, g0, g0, DELTA)
    assert cert.margin < 1e-12
    assert not cert.passed


def test_certificate_threshold():
    c = Certificate(0.5, 0.01, 3.0, True)
    assert abs(c.threshold - 0.08) < 1e-15
    assert c.to_json_obj()["verdict"] == "pass"


# ---------------------------------------------------------------------------
# finite avoidance planner
# ---------------------------------------------------------------------------

def test_empty_set_plan():
    g1, g2, cert = plan_finite_avoidance(np.zeros((0, 2)))
    assert g1 == ShearFn.zero() and g2 == ShearFn.zero()
    assert cert.passed and cert.margin == math.pi


def test_planner_on_small_set_matches_brute_force():
    xy = np.array([(0.3, 1.0), (2.0, 4.0)] + abelian_line(36))
    g1, g2, cert = plan_finite_avoidance(xy, DELTA)
    assert cert.passed
    assert abs(brute_force_margin(xy, g1, g2) - cert.margin) < 1e-12
    assert g2.sup < math.pi / 2


def test_planner_rejects_forbidden_corner():
    with pytest.raises(Infeasible) as exc:
        plan_finite_avoidance(np.array([(0.0, math.pi), (1.0, 2.0)]), DELTA)
    assert exc.value.blocking


def test_planner_on_trefoil_is_infeasible():
    # the trefoil arcs eta = pi - 6 theta cross every horizontal translate of themselves
    with pytest.raises(Infeasible):
        plan_finite_avoidance(pillowcase_of("3/1"))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_passing_certificate_means_no_critical_points(seed):
    xy = synthetic_set(np.random.default_rng(seed))
    g1, g2, cert = plan_finite_avoidance(xy, DELTA)
    assert cert.passed
    assert enumerate_critical_points(xy, xy, g1, g2, cert.margin / 2) == []


# ---------------------------------------------------------------------------
# critical point enumeration
# ---------------------------------------------------------------------------

def test_unknot_has_no_critical_points():
    g0 = ShearFn.zero()
    assert enumerate_critical_points(abelian_line(), abelian_line(), g0, g0, 0.1) == []


def test_constructed_chain_is_found():
    g1 = ShearFn(((1.0, 0.4),))
    g2 = ShearFn(((2.0, -0.3),))
    p1 = np.array([(0.5, 1.2)])
    th0 = 0.5 + g1(1.2)
    target = np.array([th0, 1.2 + g2(th0)])
    p2 = np.array([target - np.array([0.0, math.pi])])
    found = enumerate_critical_points(p1, p2, g1, g2, 1e-9)
    assert len(found) == 1
    m = found[0]
    assert m.branch == 1 and m.residual < 1e-12
    assert np.allclose(m.point_0, (th0, 1.2))
    # the mirrored chain appears on the other branch
    mirrored = enumerate_critical_points(p1, -p2, g1, g2, 1e-9)
    assert [x.branch for x in mirrored] == [-1]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_enumeration_invariant_under_negating_the_sets(seed):
    # odd shears commute with (theta, eta) -> -(theta, eta), so chains map to chains
    rng = np.random.default_rng(seed)
    p = rng.uniform(0, TWO_PI, (6, 2))
    g1 = ShearFn(((1.0, float(rng.uniform(-1, 1))),))
    g2 = ShearFn(((2.0, float(rng.uniform(-1, 1))),))
    a = enumerate_critical_points(p, p, g1, g2, 0.5)
    b = enumerate_critical_points(-p, -p, g1, g2, 0.5)
    assert sorted(round(m.residual, 9) for m in a) == sorted(round(m.residual, 9) for m in b)


# ---------------------------------------------------------------------------
# slice path planner
# ---------------------------------------------------------------------------

def dense_graph(g, n=4001):
    xs = np.linspace(-math.pi, math.pi, n)
    return np.column_stack([xs, g(xs)])


def test_slice_path_unknot():
    shifted = np.array(abelian_line()) + np.array([0.0, -math.pi])
    g = plan_slice_path(shifted, 3 * math.pi / 2, DELTA)
    assert abs(g.info["corridor_half_width"] - math.pi / 2) < 1e-12
    assert abs(g.info["level"] - math.pi / 2) < 1e-12
    assert g(0.0) == 0.0 and abs(g(math.pi)) < 1e-12
    xs = np.linspace(-5, 5, 101)
    assert np.allclose(g(-xs), -g(xs)) and np.allclose(g(xs + TWO_PI), g(xs))
    graph = dense_graph(g)
    inside = polyline_distance(graph, slice_path_vertices(g.info["level"]))
    assert inside.max() <= g.info["corridor_half_width"] + 1e-12
    clearance = polyline_distance(wrap_angle(shifted), graph_polyline(g)).min()
    assert clearance > 0


def test_slice_path_two_far_points():
    shifted = np.array([(1.5, 0.2), (4.0, 5.9)])
    g = plan_slice_path(shifted, 3 * math.pi / 2, DELTA)
    sym = np.vstack([shifted, wrap_angle(-shifted)])
    samples = wrap_angle(dense_graph(g, 200001))
    dense = float(cKDTree(samples, boxsize=TWO_PI).query(sym, p=np.inf)[0].min())
    exact = polyline_distance(sym, graph_polyline(g)).min()
    assert dense > 0 and exact > 0
    assert abs(dense - exact) < 1e-3
    assert abs(exact - g.info["graph_clearance"]) < 1e-12


def test_slice_path_blocked_on_trefoil():
    reps = pillowcase_of("3/1")
    eta0 = next(p.eta for p in reps.points if 0.5 < p.eta < 1.0)
    shifted = reps.coords() + np.array([0.0, -math.pi])
    with pytest.raises(SliceBlocked) as exc:
        plan_slice_path(shifted, eta0, reps.delta)
    assert exc.value.blocking


def test_slice_path_corridor_too_narrow():
    shifted = np.array([(0.001, 0.3)])
    with pytest.raises(CorridorTooNarrow):
        plan_slice_path(shifted, 3 * math.pi / 2, DELTA)


def test_trefoil_zero_shear_matches_reverify():
    s = pillowcase_of("3/1")
    xy = s.coords()
    g0 = ShearFn.zero()
    tol = s.delta / 2  # away from ties at exactly one grid step
    matches = enumerate_critical_points(xy, xy, g0, g0, tol)
    for m in matches:
        # direct substitution: with zero shears the chain is p -> +-p, which must sit near q + (0, pi)
        hat = m.branch * np.array(m.point_minus1)
        d = np.abs(wrap_angle(hat - np.array(m.point_1) + math.pi) - math.pi)
        assert d.max() < tol and abs(d.max() - m.residual) < 1e-12
    # brute force over all pairs finds the same number of chains
    count = 0
    u = wrap_angle(xy + np.array([0.0, math.pi]))
    for sign in (1, -1):
        t = wrap_angle(sign * xy)
        diff = np.abs(wrap_angle(t[:, None, :] - u[None, :, :] + math.pi) - math.pi).max(axis=2)
        count += int((diff < tol).sum())
    assert count == len(matches)
