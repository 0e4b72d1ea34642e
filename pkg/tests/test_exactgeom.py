from fractions import Fraction as F
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from oklab import linalg as la
from oklab.exactgeom import (ConeGen, GeometryError, LinMap, Polytope, RieszInfeasible, dual_cone, full_volume,
                             hull, interior_contains, minkowski_sum, polytope_from_inequalities,
                             polytope_volume, project_cone, riesz_extend, simplex_volume)
from oklab.lp import linprog
from oklab.serialize import cone_from_json, cone_to_json, dumps, polytope_from_json, polytope_to_json

small = st.integers(-4, 4)
point2 = st.tuples(small, small)


def shoelace(pts):
    # area of a convex polygon from its vertices in angular order
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    order = sorted(pts, key=lambda p: np.arctan2(float(p[1] - cy), float(p[0] - cx)))
    s = 0
    for (x1, y1), (x2, y2) in zip(order, order[1:] + order[:1]):
        s += F(x1) * y2 - F(x2) * y1
    return abs(s) / 2


# -- hull --------------------------------------------------------------------------------------

def test_hull_drops_interior_point():
    P = hull([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))])
    assert set(P.vertices) == {(0, 0), (1, 0), (0, 1)}


def test_hull_single_point():
    P = hull([(0, 0)])
    assert P.vertices == ((0, 0),) and P.affine_dim == 0


def test_hull_square_with_center():
    P = hull([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)])
    assert len(P.vertices) == 4 and polytope_volume(P) == 4


def test_hull_errors():
    with pytest.raises(GeometryError):
        hull([])
    with pytest.raises(GeometryError):
        hull([(0, 0), (1, 0, 0)])


@settings(max_examples=60, deadline=None)
@given(st.lists(point2, min_size=3, max_size=12, unique=True))
def test_hull_matches_scipy(pts):
    P = hull(pts)
    if P.affine_dim < 2:
        return
    ref = ConvexHull(np.array(pts, dtype=float))
    assert {tuple(pts[i]) for i in ref.vertices} == {tuple(int(c) for c in v) for v in P.vertices}
    assert float(polytope_volume(P)) == pytest.approx(ref.volume)
    assert polytope_volume(P) == shoelace([tuple(int(c) for c in v) for v in P.vertices])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=4, max_size=10, unique=True))
def test_facets_and_vertices_agree_3d(pts):
    P = hull(pts)
    for v in P.vertices:
        assert all(la.dot(n, v) >= o for n, o in P.facets)
    for p in pts:
        assert P.contains(p)
    # no vertex is a convex combination of the others
    for v in P.vertices:
        rest = [w for w in P.vertices if w != v]
        if rest:
            assert not hull(rest).contains(v)


def test_lower_dimensional_hull_in_3d():
    P = hull([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    assert P.affine_dim == 2 and not P.is_full_dim
    assert polytope_volume(P) == F(1, 2)
    assert P.contains((F(1, 4), F(1, 4), 0)) and not P.contains((F(1, 4), F(1, 4), F(1, 100)))


# -- dual cones -------------------------------------------------------------------------------

def test_dual_of_quadrant_is_quadrant():
    C = ConeGen.of([(1, 0), (0, 1)])
    assert dual_cone(C).same_set(C)


def test_dual_of_single_ray_is_half_plane():
    D = dual_cone(ConeGen.of([(1, 2)]))
    assert D.same_set(ConeGen.of([(2, -1), (-2, 1), (1, 2)]))


def test_dual_of_zero_cone_is_everything():
    D = dual_cone(ConeGen.of([], 3))
    assert D.linear_span_dim == 3 and len(D.lineality) == 3


def test_generators_are_canonical():
    C = ConeGen.of([(2, 4), (0, 3), (1, 2)])
    assert C.generators == ((0, 1), (1, 2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=0, max_size=5))
def test_double_dual_is_closure(gens):
    C = ConeGen.of(gens, 3)
    DD = dual_cone(dual_cone(C))
    assert DD.same_set(C)
    for g in C.generators:
        assert DD.contains(g)


# -- interior of the dual ---------------------------------------------------------------------

def test_interior_examples():
    D = ConeGen.of([(1, 0), (0, 1)])
    assert interior_contains(D, (1, 1))
    assert not interior_contains(D, (1, 0))
    assert not interior_contains(D, (-1, 2))
    with pytest.raises(GeometryError):
        interior_contains(D, (1, 1, 1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=4), st.tuples(small, small, small))
def test_interior_matches_perturbation(gens, c):
    D = ConeGen.of(gens, 3)
    if not D.generators:
        return
    C = dual_cone(D)
    eps = F(1, 1000)
    perturbed = all(C.contains(la.add(c, la.scale(s * eps, e)))
                    for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)) for s in (1, -1))
    # with integer data of size <= 4 the pairings are integers, so eps = 1/1000 is small enough
    assert interior_contains(D, c) == perturbed


# -- projection ---------------------------------------------------------------------------------

def test_project_octant_to_quadrant():
    r = project_cone(LinMap([[1, 0, 0], [0, 1, 0]]), ConeGen.of([(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    assert r.cone.same_set(ConeGen.of([(1, 0), (0, 1)])) and not r.interior_meets_kernel


def test_project_sum_map():
    r = project_cone(LinMap([[1, 1]]), ConeGen.of([(1, 0), (0, 1)]))
    assert r.cone.same_set(ConeGen.of([(1,)]))


def test_project_difference_map_fills_line():
    r = project_cone(LinMap([[1, -1]]), ConeGen.of([(1, 0), (0, 1)]))
    assert r.interior_meets_kernel and r.cone.linear_span_dim == 1 and not r.cone.is_pointed


def test_project_reports_non_surjective():
    r = project_cone(LinMap([[1, 1], [2, 2]]), ConeGen.of([(1, 0), (0, 1)]))
    assert not r.surjective


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                min_size=1, max_size=20))
def test_projection_closure_identity(gens, weights):
    C = ConeGen.of(gens, 3)
    L = LinMap([[1, 2, 0], [0, 1, -1]])
    img = project_cone(L, C).cone
    for w in weights:
        x = tuple(sum((F(wi) * g[k] for wi, g in zip(w, C.generators)), F(0)) for k in range(3))
        assert img.contains(L(x))
    for g in img.generators:
        # some point of C maps onto g
        k = len(C.generators)
        a_eq = [[L(C.generators[t])[r] for t in range(k)] for r in range(2)]
        assert linprog([0] * k, A_eq=a_eq, b_eq=list(g)).feasible


# -- Riesz extension -----------------------------------------------------------------------------

def _check_riesz(H, P, U, h):
    assert all(la.dot(H, u) == hv for u, hv in zip(U, h))
    assert all(la.dot(H, p) >= 0 for p in P.generators)


def test_riesz_quadrant():
    P = ConeGen.of([(1, 0), (0, 1)])
    H = riesz_extend(2, P, [(1, 1)], [1])
    _check_riesz(H, P, [(1, 1)], [1])
    assert 0 <= H[0] <= 1


def test_riesz_full_basis_is_identity():
    P = ConeGen.of([(1, 0), (0, 1)])
    assert riesz_extend(2, P, [(1, 0), (0, 1)], [2, 3]) == (2, 3)


def test_riesz_octant():
    P = ConeGen.of([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    H = riesz_extend(3, P, [(1, 1, 1)], [3])
    _check_riesz(H, P, [(1, 1, 1)], [3])
    assert sum(H) == 3


def test_riesz_domination_failure():
    P = ConeGen.of([(1, 0), (0, 1)])
    with pytest.raises(RieszInfeasible) as err:
        riesz_extend(2, P, [(1, 0)], [1])
    assert err.value.witness is not None


def test_riesz_positivity_failure():
    P = ConeGen.of([(1, 0), (0, 1)])
    with pytest.raises(RieszInfeasible):
        riesz_extend(2, P, [(1, 1)], [-1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=4),
       st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3)), st.integers(0, 5))
def test_riesz_postconditions(gens, u, hv):
    P = ConeGen.of(gens, 3)
    try:
        H = riesz_extend(3, P, [u], [hv])
    except RieszInfeasible as err:
        assert err.witness is not None
        return
    _check_riesz(H, P, [u], [hv])


# -- volume ------------------------------------------------------------------------------------

def test_volume_examples():
    assert polytope_volume(hull([(0, 0), (1, 0), (0, 1)])) == F(1, 2)
    assert polytope_volume(hull([(0, 0), (2, 0), (0, 2), (2, 2)])) == 4
    assert polytope_volume(hull([(0, 0), (2, 0), (0, 2)])) == 2


def test_volume_with_lattice():
    P = hull([(0, 0), (2, 0), (0, 2), (2, 2)])
    assert polytope_volume(P, LinMap([[2, 0], [0, 1]])) == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=4, max_size=9, unique=True),
       st.fractions(min_value=F(1, 3), max_value=3, max_denominator=5))
def test_volume_scaling_and_triangulation(pts, lam):
    P = hull(pts)
    if not P.is_full_dim:
        return
    v = polytope_volume(P)
    assert polytope_volume(P.dilate(lam)) == lam ** 3 * v
    assert sum(simplex_volume(s) for s in P.triangulate()) == v
    assert float(v) == pytest.approx(ConvexHull(np.array(pts, dtype=float)).volume)


def test_minkowski_sum_of_segments():
    S = minkowski_sum(hull([(0, 0), (1, 0)]), hull([(0, 0), (0, 1)]))
    assert polytope_volume(S) == 1 and len(S.vertices) == 4


def test_from_inequalities():
    P = polytope_from_inequalities([(1, 0), (0, 1), (-1, -1)], [0, 0, -1], 2)
    assert P.same_set(hull([(0, 0), (1, 0), (0, 1)]))
    assert polytope_from_inequalities([(1,), (-1,)], [1, 0], 1) is None
    with pytest.raises(GeometryError):
        polytope_from_inequalities([(1, 0)], [0], 2)


def test_lattice_points_match_bruteforce():
    P = hull([(0, 0), (5, 1), (2, 4), (-1, 3)])
    brute = {(x, y) for x in range(-2, 7) for y in range(-1, 6) if P.contains((x, y))}
    assert set(P.lattice_points()) == brute


def test_full_volume_requires_full_dim():
    assert full_volume(hull([(0, 0), (1, 0), (0, 1)])) == F(1, 2)


# -- serialization ---------------------------------------------------------------------------

def test_cone_and_polytope_round_trip():
    C = ConeGen.of([(1, 2), (F(1, 2), 0)])
    assert cone_from_json(cone_to_json(C)) == C
    P = hull([(0, 0), (F(3, 2), 0), (0, 1)])
    doc = polytope_to_json(P)
    assert doc["vertices"][1] == [[0, 1], [1, 1]] or [[3, 2], [0, 1]] in doc["vertices"]
    assert polytope_from_json(doc).same_set(P)
    assert dumps(doc) == dumps(polytope_to_json(polytope_from_json(doc)))
