"""Symmetric multilinear forms: evaluation, hyperbolicity checks, inertia, kernels.

Forms are stored on sorted index multisets, so symmetry holds by construction.
Every verdict is exact; inequalities between k-th roots go through
``radicals`` rather than any numerical approximation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial, prod
from typing import Mapping, Sequence

from . import linalg as la
from . import radicals


class PreconditionError(ValueError):
    """A hypothesis of a check failed; ``witness`` pinpoints where."""

    def __init__(self, reason: str, witness=None):
        super().__init__(f"{reason} (witness: {witness})")
        self.reason = reason
        self.witness = witness


@dataclass(frozen=True)
class SymMultiForm:
    """Symmetric n-linear form on Q^r, given on sorted multisets of basis indices."""

    order: int
    rank: int
    values: Mapping[tuple, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for key, v in self.values.items():
            k = tuple(sorted(int(i) for i in key))
            if len(k) != self.order or any(i < 0 or i >= self.rank for i in k):
                raise ValueError(f"bad index multiset {key}")
            v = Fraction(v)
            if v:
                vals[k] = v
        object.__setattr__(self, "values", dict(sorted(vals.items())))

    def __call__(self, *xs) -> Fraction:
        return evaluate(self, *xs)

    def vol(self, x) -> Fraction:
        return evaluate(self, *([x] * self.order))

    def contract(self, *fixed) -> "SymMultiForm":
        """The form of order n - k obtained by fixing the first k arguments."""
        k = len(fixed)
        out: dict[tuple, Fraction] = {}
        for rest in combinations_with_replacement(range(self.rank), self.order - k):
            e = [tuple(int(i == j) for j in range(self.rank)) for i in rest]
            out[rest] = evaluate(self, *fixed, *e)
        return SymMultiForm(self.order - k, self.rank, out)

    def to_json(self) -> dict:
        return {"order": self.order, "rank": self.rank,
                "values": {",".join(map(str, k)): [v.numerator, v.denominator] for k, v in self.values.items()}}

    @classmethod
    def from_json(cls, doc: Mapping) -> "SymMultiForm":
        from .serialize import unrat
        vals = {tuple(int(i) for i in k.split(",")): unrat(v) for k, v in doc["values"].items()}
        return cls(doc["order"], doc["rank"], vals)


def evaluate(T: SymMultiForm, *xs) -> Fraction:
    """Multilinear expansion over all index tuples."""
    if len(xs) != T.order:
        raise ValueError(f"form of order {T.order} given {len(xs)} arguments")
    xs = [la.vec(x) for x in xs]
    if any(len(x) != T.rank for x in xs):
        raise ValueError("argument dimension does not match the form's rank")
    supports = [[i for i, c in enumerate(x) if c] for x in xs]
    total = Fraction(0)
    for idx in product(*supports):
        v = T.values.get(tuple(sorted(idx)))
        if v:
            total += v * prod((x[i] for x, i in zip(xs, idx)), start=Fraction(1))
    return total


def rectangle_form(n: int) -> SymMultiForm:
    """(e_1, ..., e_n) = 1 and every product with a repeated index vanishes."""
    if n < 2:
        raise ValueError("order must be at least 2")
    return SymMultiForm(n, n, {tuple(range(n)): 1})


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.entries)
        r = len(rows)
        if any(len(row) != r for row in rows):
            raise ValueError("Gram matrix must be square")
        if any(rows[i][j] != rows[j][i] for i in range(r) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "entries", rows)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def pair(self, x, y) -> Fraction:
        return la.dot(la.vec(x), la.matvec(self.entries, la.vec(y)))

    def form(self) -> SymMultiForm:
        return SymMultiForm(2, self.rank, {(i, j): self.entries[i][j]
                                           for i in range(self.rank) for j in range(i, self.rank)})

    def to_json(self) -> list:
        return [[[x.numerator, x.denominator] for x in r] for r in self.entries]


def _as_form(T) -> SymMultiForm:
    return T.form() if isinstance(T, GramMatrix) else T


# -- inertia -----------------------------------------------------------------------

def signature(G) -> tuple[int, int, int]:
    """(n_plus, n_zero, n_minus) by symmetric Gaussian elimination under congruence."""
    a = [list(r) for r in (G.entries if isinstance(G, GramMatrix) else GramMatrix(G).entries)]
    n = len(a)
    plus = minus = 0
    live = list(range(n))
    while live:
        p = next((i for i in live if a[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in live for j in live if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # x_i -> x_i + x_j turns a zero diagonal into 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            p = i
        d = a[p][p]
        if d > 0:
            plus += 1
        else:
            minus += 1
        live.remove(p)
        for i in live:
            f = a[i][p] / d
            if f:
                for k in live:
                    a[i][k] -= f * a[p][k]
        for i in live:
            a[i][p] = a[p][i] = Fraction(0)
    return plus, n - plus - minus, minus


def is_hodge(G) -> bool:
    """Signature of the form (1, k, r - 1 - k)."""
    return signature(G)[0] == 1


# -- hyperbolicity ----------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    checked: dict
    failures: tuple  # (axiom, witness)

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"passed": self.passed, "checked": self.checked, "failures": to_jsonable(self.failures),
                "scope": "no counterexample among the supplied samples"}


def hyperbolic_axioms_check(T, samples: Sequence, scalings=(Fraction(1, 2), 2, 3)) -> AxiomReport:
    """Positivity, homogeneity, concavity of vol^(1/n) on segments, reverse Cauchy-Schwarz."""
    T = _as_form(T)
    n = T.order
    xs = [la.vec(s) for s in samples]
    fails = []
    counts = {"positivity": 0, "homogeneity": 0, "concavity": 0, "reverse_cauchy_schwarz": 0}
    vols = [T.vol(x) for x in xs]
    for x, v in zip(xs, vols):
        counts["positivity"] += 1
        if v <= 0:
            fails.append(("positivity", x))
        for lam in scalings:
            counts["homogeneity"] += 1
            lam = Fraction(lam)
            if T.vol(la.scale(lam, x)) != lam ** n * v:
                fails.append(("homogeneity", (x, lam)))
    for (x, vx), (y, vy) in combinations_with_replacement(list(zip(xs, vols)), 2):
        if vx <= 0 or vy <= 0:
            continue
        counts["concavity"] += 1
        mid = la.scale(Fraction(1, 2), la.add(x, y))
        # vol(mid)^(1/n) >= (vol(x)^(1/n) + vol(y)^(1/n)) / 2
        if radicals.sign_of_sum([(2, T.vol(mid)), (-1, vx), (-1, vy)], n) < 0:
            fails.append(("concavity", (x, y)))
    for head in combinations_with_replacement(xs, n - 2):
        for b, c in combinations_with_replacement(xs, 2):
            counts["reverse_cauchy_schwarz"] += 1
            bc = evaluate(T, *head, b, c)
            if bc ** 2 < evaluate(T, *head, b, b) * evaluate(T, *head, c, c):
                fails.append(("reverse_cauchy_schwarz", (head, b, c)))
    return AxiomReport(not fails, counts, tuple(fails))


def chain_inequality_check(T, *xs) -> bool:
    """(x_1, ..., x_n)^n >= prod (x_i, ..., x_i), compared as exact powers."""
    T = _as_form(T)
    n = T.order
    if len(xs) != n:
        raise ValueError(f"need {n} arguments")
    selfs = [T.vol(x) for x in xs]
    bad = next((x for x, v in zip(xs, selfs) if v <= 0), None)
    if bad is not None:
        raise PreconditionError("nonpositive self-product", bad)
    mixed = evaluate(T, *xs)
    return mixed >= 0 and mixed ** n >= prod(selfs, start=Fraction(1))


def volume_root_concavity_check(T, a, b, steps: int = 4) -> bool:
    """vol^(1/n)(a + b) >= vol^(1/n)(a) + vol^(1/n)(b), and midpoint concavity on a grid."""
    T = _as_form(T)
    n = T.order
    va, vb = T.vol(a), T.vol(b)
    if va <= 0 or vb <= 0:
        raise PreconditionError("nonpositive volume", a if va <= 0 else b)
    a, b = la.vec(a), la.vec(b)
    if not radicals.brunn_minkowski_holds(T.vol(la.add(a, b)), va, vb, n):
        return False
    pts = [la.add(la.scale(1 - Fraction(k, steps), a), la.scale(Fraction(k, steps), b)) for k in range(steps + 1)]
    vols = [T.vol(p) for p in pts]
    for k in range(1, steps):
        if radicals.sign_of_sum([(2, vols[k]), (-1, vols[k - 1]), (-1, vols[k + 1])], n) < 0:
            return False
    return True


# -- surface-lattice checks ---------------------------------------------------------------

def castelnuovo_check(G: GramMatrix, P1, P2, D) -> bool:
    """(D, D) <= 2 (D.P1)(D.P2) for isotropic P1, P2 with P1.P2 = 1."""
    if G.pair(P1, P1) != 0 or G.pair(P2, P2) != 0:
        raise PreconditionError("P_i must satisfy P_i^2 = 0", (P1, P2))
    if G.pair(P1, P2) != 1:
        raise PreconditionError("P1.P2 must equal 1", G.pair(P1, P2))
    return G.pair(D, D) <= 2 * G.pair(D, P1) * G.pair(D, P2)


@dataclass(frozen=True)
class PdcResult:
    neg_semidef: bool
    kernel_basis: tuple
    components: tuple

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"neg_semidef": self.neg_semidef, "kernel_basis": to_jsonable(self.kernel_basis),
                "components": [list(c) for c in self.components]}


def _components(G: GramMatrix) -> list[tuple]:
    r = G.rank
    seen, out = set(), []
    for s in range(r):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(r):
                if j != i and j not in seen and G.entries[i][j] != 0:
                    seen.add(j)
                    stack.append(j)
        out.append(tuple(sorted(comp)))
    return out


def pdc_analysis(G: GramMatrix, alpha: Sequence) -> PdcResult:
    """Negative semidefiniteness and kernel of G given a positive null combination.

    Hypotheses: f = sum alpha_i v_i is orthogonal to every v_j, and
    v_i . v_j >= 0 off the diagonal.  The kernel has one generator
    sum_{i in c} alpha_i e_i per connected component c of the graph with an
    edge wherever v_i . v_j != 0.
    """
    alpha = la.vec(alpha)
    r = G.rank
    if len(alpha) != r or any(a <= 0 for a in alpha):
        raise PreconditionError("alpha must be a positive vector of the right length", alpha)
    for j in range(r):
        vf = la.dot(G.entries[j], alpha)
        if vf != 0:
            raise PreconditionError(f"v_{j} . f = {vf} is not zero", j)
    for i in range(r):
        for j in range(i + 1, r):
            if G.entries[i][j] < 0:
                raise PreconditionError(f"v_{i} . v_{j} is negative", (i, j))
    comps = _components(G)
    kernel = []
    for c in comps:
        k = tuple(alpha[i] if i in c else Fraction(0) for i in range(r))
        assert all(x == 0 for x in la.matvec(G.entries, k))
        kernel.append(k)
    plus, _, _ = signature(G)
    return PdcResult(plus == 0, tuple(kernel), tuple(comps))


def calabi_kernel_check(T: SymMultiForm, samples: Sequence, V_basis: Sequence, a1, a2) -> bool:
    """b_a(a1 - a2, v) = 0 for sampled a in A^(n-1) and v in a basis of V.

    T has order n + 1 and b_a(x, y) = T(a, x, y).  Preconditions: c = a1 - a2
    lies in span V; b_a is negative semidefinite on V for each sampled a;
    T(c, a1, ..., a1) = T(c, a2, ..., a2).
    """
    n = T.order - 1
    a1, a2 = la.vec(a1), la.vec(a2)
    c = la.sub(a1, a2)
    if la.is_zero(c):
        return True
    V = [la.vec(v) for v in V_basis]
    if la.solve(la.transpose(V), c) is None:
        raise PreconditionError("a1 - a2 is not in span V", c)
    lhs, rhs = evaluate(T, c, *([a1] * n)), evaluate(T, c, *([a2] * n))
    if lhs != rhs:
        raise PreconditionError(f"T(c, a1^n) = {lhs} differs from T(c, a2^n) = {rhs}", (a1, a2))
    heads = list(combinations_with_replacement([la.vec(s) for s in samples], n - 1))
    for head in heads:
        g = [[evaluate(T, *head, u, v) for v in V] for u in V]
        if signature(g)[0] != 0:
            raise PreconditionError("b_a is not negative semidefinite on V", head)
    return all(evaluate(T, *head, c, v) == 0 for head in heads for v in V)
