import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oklab import linalg as la
from oklab.bigcone import (FIXTURES, SurfaceLattice, bound_15cor_check, bound_2215_check, chamber,
                           duality_sandwich_check, dvol_check, fixture, fujita_approx, load_surface,
                           monotone_product_check, psi, vol, zariski)
from oklab.exactgeom import GeometryError
from oklab.forms import GramMatrix, signature
from oklab.okounkov import GradedValueSets, normalized_volume
from oklab.toric import volume_sections

BL1 = fixture("bl1p2")
H, E = (1, 0), (0, 1)


def grid_sup_square(S, x, den=4, span=6):
    # sup of y.y over nef y with x - y psef, by a rational grid (rank 2 only)
    best = F(0)
    for a, b in product(range(-span * den, span * den + 1), repeat=2):
        y = (F(a, den), F(b, den))
        if S.is_nef(y) and S.is_psef(la.sub(x, y)):
            best = max(best, S.dot(y, y))
    return best


def big_samples(S, rng, n):
    out = []
    amp = tuple(sum((g[i] for g in S.nef_gens), F(0)) for i in range(S.rank))
    for _ in range(n):
        x = amp
        for e in S.eff_gens:
            x = la.add(x, la.scale(F(rng.randint(0, 6), rng.randint(1, 3)), e))
        out.append(x)
    return out


# -- fixtures ------------------------------------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_are_valid(name):
    S = fixture(name)
    assert signature(S.gram) == (1, 0, S.rank - 1)
    for x in S.nef_gens:
        assert all(S.dot(x, e) >= 0 for e in S.eff_gens)


def test_blowup_gram():
    assert BL1.gram.entries == ((1, 0), (0, -1))
    assert BL1.eff_cone().same_set(SurfaceLattice(GramMatrix([[1, 0], [0, -1]]), (E, (1, -1))).eff_cone())


def test_bad_surface_rejected():
    with pytest.raises(GeometryError):
        SurfaceLattice(GramMatrix([[1, 0], [0, 1]]), ((1, 0), (0, 1)))


def test_load_surface_from_table():
    S = load_surface({"gram": [[1, 0], [0, -1]], "eff": [[0, 1], [1, -1]]})
    assert S.is_nef(H) and not S.is_ample(H) and S.is_ample((3, -1))
    assert load_surface({"name": "bl1p2"}) == BL1


# -- psi / Zariski ----------------------------------------------------------------------------------------

def test_psi_examples():
    z = zariski(BL1, (1, 1))
    assert z.positive == H and z.negative == E and z.vol == 1
    assert psi(BL1, (3, -1)) == (3, -1) and vol(BL1, (3, -1)) == 8
    assert psi(BL1, H) == H


def test_vol_examples():
    P2 = fixture("p2")
    for d in range(1, 5):
        assert vol(P2, (d,)) == d * d
    assert vol(BL1, (-1, 0)) == 0
    assert vol(BL1, (1, 1)) == 1


def test_not_big_raises():
    with pytest.raises(GeometryError):
        psi(BL1, (1, -1))
    with pytest.raises(GeometryError):
        zariski(BL1, (-1, 0))


@pytest.mark.parametrize("x", [(1, 1), (2, 1), (3, -1), (2, -1), (1, 3), (F(5, 2), F(1, 3))])
def test_psi_matches_grid_oracle(x):
    v = vol(BL1, x)
    grid = grid_sup_square(BL1, x)
    assert grid <= v
    assert v - grid <= F(1, 2)  # grid step 1/4


@pytest.mark.parametrize("name", ["bl1p2", "bl2p2", "bl3p2", "f1", "f2", "bl1p1xp1"])
def test_zariski_certificate(name):
    S = fixture(name)
    rng = random.Random(3)
    for x in big_samples(S, rng, 20):
        z = zariski(S, x)
        assert S.is_nef(z.positive) and S.is_psef(z.negative)
        assert S.dot(z.positive, z.negative) == 0
        if z.support:
            g = [[S.dot(a, b) for b in z.support] for a in z.support]
            assert signature(g) == (0, 0, len(z.support))
        assert S.dot(x, z.positive) == z.vol


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=0, max_value=5, max_denominator=4), st.fractions(min_value=0, max_value=5, max_denominator=4),
       st.fractions(min_value=F(1, 4), max_value=4, max_denominator=4))
def test_psi_homogeneous_and_fixed(a, b, lam):
    x = la.add((1, 0), la.add(la.scale(a, E), la.scale(b, (1, -1))))
    p = psi(BL1, x)
    assert psi(BL1, la.scale(lam, x)) == la.scale(lam, p)
    assert psi(BL1, p) == p
    assert BL1.dot(p, la.sub(x, p)) == 0


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=0, max_value=3, max_denominator=3), st.fractions(min_value=0, max_value=3, max_denominator=3),
       st.fractions(min_value=0, max_value=3, max_denominator=3))
def test_psi_monotone(a, b, c):
    S = fixture("bl2p2")
    x = (1 + a, -F(1, 3), -F(1, 3))
    y = la.add(x, la.scale(b, S.eff_gens[0]))
    y = la.add(y, la.scale(c, S.eff_gens[-1]))
    px, py = psi(S, x), psi(S, y)
    for h in S.nef_gens:
        assert S.dot(px, h) <= S.dot(py, h)


def test_cross_oracle_volume():
    for name in ("p2", "p1xp1", "bl1p2", "f1", "f2"):
        S = fixture(name)
        rng = random.Random(11)
        for x in big_samples(S, rng, 5):
            x = tuple(F(int(c)) for c in x)  # toric divisors need integral classes for h0
            D = S.divisor_of_class(x)
            v = vol(S, x)
            assert volume_sections(D, 1)[1] == v
            assert normalized_volume(GradedValueSets.from_divisor(D, 1)) == v


# -- differentiability ------------------------------------------------------------------------------------

def test_dvol_examples():
    r = dvol_check(BL1, (1, 1), E, F(1, 16))
    assert r.same_chamber and r.quotient == 0 == r.expected
    r = dvol_check(BL1, (1, 1), H, F(1, 16))
    assert r.quotient == 2 == r.expected
    P2 = fixture("p2")
    r = dvol_check(P2, (1,), (1,), F(1, 8))
    assert r.quotient == 2 and r.holds
    with pytest.raises(ValueError):
        dvol_check(BL1, (1, 1), H, 0)


def test_dvol_across_wall_reports_one_sided():
    # H + tE crosses the wall at t = 0 between the nef cone and the E-chamber
    r = dvol_check(BL1, H, E, F(1, 4))
    assert not r.same_chamber and r.one_sided is not None and r.holds is None


# -- sandwich ---------------------------------------------------------------------------------------------

def test_sandwich_examples():
    r = duality_sandwich_check(BL1, [(1, 1)], [H, (3, -1)])
    assert r.holds
    statuses = dict((tuple(c), s) for c, s in r.fixed_points)
    assert statuses[H] == "boundary" and statuses[(3, -1)] == "fixed"


# -- Fujita -------------------------------------------------------------------------------------------------

def test_fujita_examples():
    r = fujita_approx(BL1, (1, 1), F(1, 10))
    assert r.vol_A >= F(9, 10) and BL1.is_ample(r.A) and BL1.is_psef(la.sub((1, 1), r.A))
    r = fujita_approx(BL1, (3, -1), F(1, 10))
    assert r.vol_A >= F(9, 10) * 8
    r = fujita_approx(BL1, (3, -1), 1)
    assert BL1.is_ample(r.A)


# -- bounds ------------------------------------------------------------------------------------------------

def test_bound_2215_examples():
    P2 = fixture("p2")
    assert bound_2215_check(P2, (2,), (1,))
    assert bound_2215_check(P2, (2,), (0,))
    assert bound_2215_check(BL1, (3, -1), (1, -1))
    assert vol(BL1, (2, 0)) == 8 - 2 * BL1.dot((3, -1), (1, -1))
    with pytest.raises(GeometryError):
        bound_2215_check(BL1, (1, 1), H)


def test_bound_15cor_examples():
    P2 = fixture("p2")
    assert bound_15cor_check(P2, (1,), (1,), (1,), F(1, 2))
    assert bound_15cor_check(P2, (1,), (1,), (1,), 0)
    assert bound_15cor_check(BL1, H, E, (3, -1), F(1, 4))
    with pytest.raises(GeometryError):
        bound_15cor_check(P2, (1,), (1,), (1,), 2)


def test_monotone_examples():
    P2 = fixture("p2")
    assert monotone_product_check(P2, (1,), (1,), (2,), (2,))
    assert monotone_product_check(P2, (1,), (1,), (1,), (1,))
    assert monotone_product_check(BL1, (1, -1), H, H, (3, -1))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))
def test_bound_2215_random_nef(a, b, c, d):
    # nef cone of Bl1P2 is generated by H and H - E
    A = la.add(la.scale(a, H), la.scale(b, (1, -1)))
    B = la.add(la.scale(c, H), la.scale(d, (1, -1)))
    assert bound_2215_check(BL1, A, B)
