import random
from fractions import Fraction as F
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oklab import linalg as la
from oklab.forms import (GramMatrix, PreconditionError, SymMultiForm, calabi_kernel_check, castelnuovo_check,
                         chain_inequality_check, evaluate, hyperbolic_axioms_check, is_hodge, pdc_analysis,
                         rectangle_form, signature, volume_root_concavity_check)

R3 = rectangle_form(3)
e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
pos3 = st.tuples(*[st.integers(1, 9)] * 3)


def numpy_inertia(G):
    w = np.linalg.eigvalsh(np.array(G, dtype=float))
    return (int((w > 1e-9).sum()), int((abs(w) <= 1e-9).sum()), int((w < -1e-9).sum()))


# -- evaluation --------------------------------------------------------------------------------------

def test_rectangle_values():
    assert evaluate(R3, e1, e2, e3) == 1
    assert evaluate(R3, (1, 2, 3), (1, 2, 3), (1, 2, 3)) == 36
    assert evaluate(R3, e1, e1, e2) == 0
    assert evaluate(R3, e1, e1, e1) == 0
    assert evaluate(R3, (0, 0, 0), (1, 2, 3), e2) == 0
    G2 = [[rectangle_form(2)(a, b) for b in ((1, 0), (0, 1))] for a in ((1, 0), (0, 1))]
    assert G2 == [[0, 1], [1, 0]]


def test_arity_mismatch():
    with pytest.raises(ValueError):
        evaluate(R3, e1, e2)


@settings(max_examples=100, deadline=None)
@given(pos3)
def test_box_volume_law(c):
    assert R3(c, c, c) == factorial(3) * c[0] * c[1] * c[2]


@settings(max_examples=40, deadline=None)
@given(pos3, pos3, pos3, st.integers(-3, 3))
def test_multilinear_and_symmetric(a, b, c, k):
    assert R3(a, b, c) == R3(c, a, b) == R3(b, c, a)
    assert R3(la.add(a, la.scale(k, b)), b, c) == R3(a, b, c) + k * R3(b, b, c)


def test_form_round_trip():
    T = SymMultiForm(3, 2, {(0, 0, 1): F(1, 2), (1, 1, 1): 3})
    assert SymMultiForm.from_json(T.to_json()) == T
    assert "0,0,1" in T.to_json()["values"]


# -- signature --------------------------------------------------------------------------------------------

def test_signature_examples():
    assert signature(GramMatrix([[0, 1], [1, 0]])) == (1, 0, 1)
    assert signature(GramMatrix([[1, 0], [0, -1]])) == (1, 0, 1)
    assert signature(GramMatrix([[0, 0, 0]] * 3)) == (0, 3, 0)
    assert is_hodge(GramMatrix([[1, 0], [0, -1]]))
    assert not is_hodge(GramMatrix([[1, 0], [0, 1]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)), st.integers(0, 10 ** 6))
def test_signature_invariant_and_matches_numpy(rows, seed):
    n = len(rows)
    G = [[rows[i][j] + rows[j][i] for j in range(n)] for i in range(n)]
    assert signature(G) == numpy_inertia(G)
    # random unimodular congruence
    rng = random.Random(seed)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(4):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            c = rng.randint(-2, 2)
            U = [[U[r][s] + (c * U[j][s] if r == i else 0) for s in range(n)] for r in range(n)]
    UGU = la.matmul(la.transpose(U), la.matmul(G, U))
    assert signature(UGU) == signature(G)


# -- axioms and chain ---------------------------------------------------------------------------------------

def test_axioms_rectangle_octant():
    r = hyperbolic_axioms_check(R3, [(1, 1, 1), (1, 2, 3), (2, 1, 1), (F(1, 2), 3, 2)])
    assert r.passed and not r.failures


def test_axioms_lorentz_future_cone():
    r = hyperbolic_axioms_check(GramMatrix([[1, 0], [0, -1]]), [(2, 1), (3, -1), (1, 0), (5, 4)])
    assert r.passed


def test_axioms_identity_fails_with_witness():
    r = hyperbolic_axioms_check(GramMatrix([[1, 0], [0, 1]]), [(1, 0), (0, 1), (1, 2)])
    assert not r.passed and any(f[0] == "reverse_cauchy_schwarz" for f in r.failures)


def test_chain_examples():
    assert chain_inequality_check(R3, (1, 1, 1), (1, 2, 3), (2, 1, 1))
    assert chain_inequality_check(R3, (1, 2, 3), (1, 2, 3), (1, 2, 3))
    R2 = rectangle_form(2)
    assert R2((1, 2), (2, 1)) ** 2 == 25 and R2((1, 2), (1, 2)) * R2((2, 1), (2, 1)) == 16
    assert chain_inequality_check(R2, (1, 2), (2, 1))
    with pytest.raises(PreconditionError):
        chain_inequality_check(R3, (1, 0, 0), (1, 1, 1), (1, 1, 1))


@settings(max_examples=60, deadline=None)
@given(pos3, pos3, pos3)
def test_chain_follows_from_axioms(a, b, c):
    if hyperbolic_axioms_check(R3, [a, b, c]).passed:
        assert chain_inequality_check(R3, a, b, c)


# -- concavity -------------------------------------------------------------------------------------------

def test_concavity_examples():
    assert volume_root_concavity_check(R3, (1, 1, 1), (1, 2, 3))
    assert volume_root_concavity_check(R3, (1, 2, 3), (1, 2, 3))
    assert volume_root_concavity_check(GramMatrix([[0, 1], [1, 0]]), (1, 2), (2, 1))
    with pytest.raises(PreconditionError):
        volume_root_concavity_check(R3, (0, 1, 1), (1, 1, 1))


# -- Castelnuovo -----------------------------------------------------------------------------------------

def test_castelnuovo_examples():
    G = GramMatrix([[0, 1], [1, 0]])
    assert castelnuovo_check(G, (1, 0), (0, 1), (3, 2))
    assert castelnuovo_check(G, (1, 0), (0, 1), (1, 0))
    with pytest.raises(PreconditionError):
        castelnuovo_check(G, (1, 1), (0, 1), (3, 2))


@settings(max_examples=80, deadline=None)
@given(st.tuples(*[st.integers(-9, 9)] * 3))
def test_castelnuovo_on_blowup(D):
    # Bl_1(P1 x P1) in the basis (F1, F2, E): F1.F2 = 1, E^2 = -1
    G = GramMatrix([[0, 1, 0], [1, 0, 0], [0, 0, -1]])
    assert castelnuovo_check(G, (1, 0, 0), (0, 1, 0), D)


# -- pdc ----------------------------------------------------------------------------------------------

def test_pdc_examples():
    r = pdc_analysis(GramMatrix([[-1, 1], [1, -1]]), (1, 1))
    assert r.neg_semidef and r.kernel_basis == ((1, 1),)
    block = [[-1, 1, 0, 0], [1, -1, 0, 0], [0, 0, -1, 1], [0, 0, 1, -1]]
    r = pdc_analysis(GramMatrix(block), (1, 1, 1, 1))
    assert r.kernel_basis == ((1, 1, 0, 0), (0, 0, 1, 1))
    with pytest.raises(PreconditionError) as err:
        pdc_analysis(GramMatrix([[-1, 0], [0, -1]]), (1, 1))
    assert err.value.witness is not None


def block_graph_instance(rng):
    # disjoint cycles/paths of fibre components; G = A - D with D_i = sum_j A_ij alpha_j / alpha_i
    sizes = [rng.randint(1, 4) for _ in range(rng.randint(1, 4))]
    n = sum(sizes)
    A = [[F(0)] * n for _ in range(n)]
    start = 0
    for s in sizes:
        for i in range(start, start + s - 1):
            w = F(rng.randint(1, 3))
            A[i][i + 1] = A[i + 1][i] = w
        start += s
    alpha = [F(rng.randint(1, 4)) for _ in range(n)]
    G = [[A[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        G[i][i] = -sum((A[i][j] * alpha[j] for j in range(n)), F(0)) / alpha[i]
    return G, alpha, len(sizes)


def test_pdc_random_block_graphs():
    rng = random.Random(7)
    for _ in range(100):
        G, alpha, comps = block_graph_instance(rng)
        r = pdc_analysis(GramMatrix(G), alpha)
        assert r.neg_semidef and len(r.kernel_basis) == comps
        for k in r.kernel_basis:
            assert la.is_zero(la.matvec(G, k))
        assert signature(G)[1] == comps


# -- Calabi --------------------------------------------------------------------------------------------

def test_calabi_examples():
    samples = [(1, 1, 1), (1, 2, 3), (2, 1, 1)]
    assert calabi_kernel_check(R3, samples, [e3], (1, 1, 1), (1, 1, 2))
    assert calabi_kernel_check(R3, samples, [e3], (1, 1, 1), (1, 1, 1))
    with pytest.raises(PreconditionError):
        calabi_kernel_check(R3, samples, [(1, -1, 0)], (2, 1, 1), (1, 2, 1))
