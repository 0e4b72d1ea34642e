from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oklab import linalg as la
from oklab.exactgeom import hull
from oklab.semigroups import (UNKNOWN, GradedSemigroup, SaturationPrecondition, SemigroupGens, cone_closure,
                              enumerate_semigroup, group_closure, khovanskii_shift, membership,
                              saturation_level, verify_khovanskii)
from oklab.exactgeom import ConeGen

GAP = SemigroupGens.of([(2, 0), (3, 0), (0, 1)])


def brute_semigroup(gens, box):
    # every nonnegative combination reachable inside [-box, box]^2 by repeated addition
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = (p[0] + g[0], p[1] + g[1])
                if max(abs(q[0]), abs(q[1])) <= box and q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


# -- closures ------------------------------------------------------------------------------------

def test_group_closure_examples():
    assert group_closure(GAP) == [(1, 0), (0, 1)]
    assert group_closure(SemigroupGens.of([(1, 0)])) == [(1, 0)]
    assert group_closure(SemigroupGens.of([(2, 0), (0, 2)])) == [(2, 0), (0, 2)]


def test_cone_closure_examples():
    assert cone_closure(GAP).same_set(ConeGen.of([(1, 0), (0, 1)]))
    assert cone_closure(SemigroupGens.of([(1, 2), (1, 3)])).generators == ((1, 2), (1, 3))
    line = cone_closure(SemigroupGens.of([(1, 0), (-1, 0)]))
    assert not line.is_pointed and line.linear_span_dim == 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=4))
def test_group_closure_is_hnf_basis(gens):
    F_ = SemigroupGens.of(gens)
    B = group_closure(F_)
    for g in F_.F:
        assert la.lattice_contains(B, g)
    for b in B:
        assert la.integer_coordinates(list(F_.F), b) is not None


# -- membership -------------------------------------------------------------------------------------

def test_membership_examples():
    assert membership(GAP, (1, 5), 10) is False
    assert membership(GAP, (0, 0), 0) is True
    assert membership(GAP, (7, 1), 5) is True


def test_membership_unknown_when_bound_too_small():
    assert membership(GAP, (20, 0), 2) is UNKNOWN
    assert UNKNOWN is not False


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=3),
       st.tuples(st.integers(0, 6), st.integers(0, 6)))
def test_membership_matches_bruteforce(gens, a):
    F_ = SemigroupGens.of(gens)
    got = membership(F_, a, 12)
    if got is UNKNOWN:
        return
    assert got == (a in brute_semigroup(F_.F, 12))


# -- Khovanskii -------------------------------------------------------------------------------------

def test_khovanskii_gap_fixture():
    s = khovanskii_shift(GAP)
    assert verify_khovanskii(GAP, s).valid
    # the shift (2,0) works and the origin does not
    assert verify_khovanskii(GAP, (2, 0)).valid
    assert not verify_khovanskii(GAP, (0, 0)).valid


def test_khovanskii_saturated_cases():
    assert khovanskii_shift(SemigroupGens.of([(1, 0), (0, 1)])) == (0, 0)
    assert khovanskii_shift(SemigroupGens.of([(1, 0), (1, 2)])) == (0, 0)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=3))
def test_khovanskii_window_certificate(gens):
    F_ = SemigroupGens.of(gens)
    s = khovanskii_shift(F_, verify=False)
    cert = verify_khovanskii(F_, s)
    assert cert.valid, cert.failures[:3]
    assert membership(F_, s, 50) is True


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.integers(-1, 3), st.integers(0, 3)), min_size=1, max_size=3), st.integers(1, 4))
def test_semigroup_inside_group_and_cone(gens, level):
    F_ = SemigroupGens.of(gens)
    B, C = group_closure(F_), cone_closure(F_)
    if not C.is_pointed:
        return
    for p in enumerate_semigroup(F_, level):
        assert la.lattice_contains(B, p) and C.contains(p)


# -- graded saturation ---------------------------------------------------------------------------------

def test_saturated_segment():
    S = GradedSemigroup.from_generators([(1, (0,)), (1, (1,))], 8)
    r = saturation_level(S, hull([(F(1, 4),), (F(3, 4),)]), 8)
    assert r.m0 == 1


def test_gap_semigroup_saturates():
    S = GradedSemigroup.from_level_one([(0,), (2,), (3,)], 12)
    r = saturation_level(S, hull([(1,), (2,)]), 12)
    assert r.found and r.m0 >= 1
    assert all(ok for m, ok in r.per_level if m >= r.m0)


def test_boundary_K_is_rejected():
    S = GradedSemigroup.from_level_one([(0,), (2,), (3,)], 6)
    with pytest.raises(SaturationPrecondition):
        saturation_level(S, hull([(0,), (1,)]), 6)


def test_superadditivity_checked_on_construction():
    with pytest.raises(ValueError):
        GradedSemigroup(1, {1: frozenset({(0,), (1,)}), 2: frozenset({(0,)})})


def test_saturation_monotone_in_K():
    S = GradedSemigroup.from_level_one([(0,), (2,), (3,)], 12)
    big = saturation_level(S, hull([(F(1, 2),), (F(5, 2),)]), 12)
    small = saturation_level(S, hull([(1,), (2,)]), 12)
    assert small.m0 <= big.m0


def test_round_trips():
    assert SemigroupGens.from_json(GAP.to_json()) == GAP
    S = GradedSemigroup.from_level_one([(0,), (2,), (3,)], 4)
    assert GradedSemigroup.from_json(S.to_json()) == S
    assert set(S.to_json()) == {"d", "levels"}
