"""Intersection theory on surfaces: N^1 with its pairing, Zariski decomposition, volume.

Classes are coordinate vectors in a fixed basis of N^1; the pairing is
x^T G y.  The effective cone is generated by classes of irreducible curves
and the nef cone is its dual under the pairing.  The positive part of a
pseudo-effective class is found by enumerating candidate negative supports:
sets of curves with negative-definite Gram matrix, ordered lexicographically.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from . import linalg as la
from .exactgeom import ConeGen, GeometryError, dual_cone, interior_contains
from .forms import GramMatrix, signature
from .lp import feasible_point
from .toric import (Fan, ToricDivisor, blowup_fan, blown_up_plane, hirzebruch, intersection_matrix,
                    p1_x_p1, projective_plane, pullback)


@dataclass(frozen=True)
class SurfaceLattice:
    """N^1 of a surface: Gram matrix plus effective and nef generators."""

    gram: GramMatrix
    eff_gens: tuple
    nef_gens: tuple = ()
    name: str = ""
    fan: Fan | None = None
    ray_classes: tuple = ()  # class of each torus-invariant prime divisor, for toric surfaces

    def __post_init__(self):
        if not isinstance(self.gram, GramMatrix):
            object.__setattr__(self, "gram", GramMatrix(self.gram))
        r = self.gram.rank
        eff = tuple(la.vec(e) for e in self.eff_gens)
        if any(len(e) != r for e in eff):
            raise ValueError("effective generator of wrong length")
        object.__setattr__(self, "eff_gens", eff)
        nef = tuple(la.vec(x) for x in self.nef_gens) if self.nef_gens else self._dual_of_eff()
        object.__setattr__(self, "nef_gens", nef)
        object.__setattr__(self, "ray_classes", tuple(la.vec(c) for c in self.ray_classes))
        for x in nef:
            for e in eff:
                if self.dot(x, e) < 0:
                    raise GeometryError(f"nef generator {x} is negative on effective {e}")
        if signature(self.gram)[0] != 1 or signature(self.gram)[1] != 0:
            raise GeometryError(f"Gram matrix has signature {signature(self.gram)}, not (1, 0, r-1)")

    @property
    def rank(self) -> int:
        return self.gram.rank

    def dot(self, x, y) -> Fraction:
        return self.gram.pair(x, y)

    def _dual_of_eff(self) -> tuple:
        images = [la.matvec(self.gram.entries, e) for e in self.eff_gens]
        return tuple(la.vec(g) for g in dual_cone(ConeGen.of(images, self.rank)).generators)

    def eff_cone(self) -> ConeGen:
        return ConeGen.of(self.eff_gens, self.rank)

    def is_nef(self, x) -> bool:
        return all(self.dot(x, e) >= 0 for e in self.eff_gens)

    def is_ample(self, x) -> bool:
        """Strictly positive on every effective generator (interior of the nef cone)."""
        images = ConeGen.of([la.matvec(self.gram.entries, e) for e in self.eff_gens], self.rank)
        return interior_contains(images, x)

    def is_psef(self, x) -> bool:
        return self.eff_coefficients(x) is not None

    def eff_coefficients(self, x):
        """Nonnegative lambda with sum lambda_i e_i = x, or None."""
        x = la.vec(x)
        k = len(self.eff_gens)
        a_eq = [[self.eff_gens[i][r] for i in range(k)] for r in range(self.rank)]
        return feasible_point(a_eq, list(x), nvars=k)

    @property
    def curves(self) -> tuple:
        """Effective generators of negative self-intersection."""
        return tuple(e for e in self.eff_gens if self.dot(e, e) < 0)

    def to_json(self) -> dict:
        from .serialize import vector
        return {"name": self.name, "gram": self.gram.to_json(),
                "eff": [vector(e) for e in self.eff_gens], "nef": [vector(x) for x in self.nef_gens]}

    @classmethod
    def from_fan(cls, fan: Fan, basis: Sequence[ToricDivisor], name: str = "") -> "SurfaceLattice":
        """N^1 of a smooth complete toric surface in the basis of the given divisors."""
        M = intersection_matrix(fan)

        def pair(a, b):
            return sum((x * M[i][j] * y for i, x in enumerate(a) for j, y in enumerate(b)), Fraction(0))

        B = [D.coeffs for D in basis]
        gram = [[pair(a, b) for b in B] for a in B]
        if len(basis) != len(fan.rays) - fan.dim:
            raise GeometryError("basis size must equal the Picard rank")
        classes = []
        for i in range(len(fan.rays)):
            e = tuple(int(i == j) for j in range(len(fan.rays)))
            c = la.solve(gram, [pair(e, b) for b in B])
            if c is None:
                raise GeometryError("basis does not span N^1")
            classes.append(c)
        eff = dual_cone(dual_cone(ConeGen.of(classes, len(B)))).generators
        return cls(GramMatrix(gram), tuple(eff), (), name, fan, tuple(classes))

    def divisor_class(self, D: ToricDivisor) -> tuple:
        """Coordinates of a torus-invariant divisor on the underlying fan."""
        if self.fan is None or D.fan != self.fan:
            raise GeometryError("divisor does not live on this surface's fan")
        out = tuple(Fraction(0) for _ in range(self.rank))
        for a, c in zip(D.coeffs, self.ray_classes):
            out = la.add(out, la.scale(a, c))
        return out

    def divisor_of_class(self, x) -> ToricDivisor:
        """Some torus-invariant divisor in class x."""
        if self.fan is None:
            raise GeometryError("not a toric surface")
        k = len(self.ray_classes)
        a_eq = [[self.ray_classes[i][r] for i in range(k)] for r in range(self.rank)]
        sol = la.solve(a_eq, la.vec(x))
        return ToricDivisor(self.fan, sol)


# -- fixtures ------------------------------------------------------------------------------

def _pullbacks_and_exceptionals(k: int):
    fan = blown_up_plane(k)
    H = pullback(ToricDivisor.prime(projective_plane(), (-1, -1)), fan)
    es = [ToricDivisor.prime(fan, fan.rays[3 + i]) for i in range(k)]
    return fan, [H] + es


def fixture(name: str) -> SurfaceLattice:
    """Built-in surfaces: p2, p1xp1, bl1p2, bl2p2, bl3p2, f0..f3."""
    if name == "p2":
        fan = projective_plane()
        return SurfaceLattice.from_fan(fan, [ToricDivisor.prime(fan, (-1, -1))], "p2")
    if name == "p1xp1":
        fan = p1_x_p1()
        return SurfaceLattice.from_fan(fan, [ToricDivisor.prime(fan, (1, 0)), ToricDivisor.prime(fan, (0, 1))], "p1xp1")
    if name in ("bl1p2", "bl2p2", "bl3p2"):
        fan, basis = _pullbacks_and_exceptionals(int(name[2]))
        return SurfaceLattice.from_fan(fan, basis, name)
    if len(name) == 2 and name[0] == "f" and name[1] in "0123":
        fan = hirzebruch(int(name[1]))
        return SurfaceLattice.from_fan(fan, [ToricDivisor.prime(fan, (1, 0)), ToricDivisor.prime(fan, (0, 1))], name)
    if name == "bl1p1xp1":
        fan = blowup_fan(p1_x_p1(), (0, 1))
        basis = [pullback(ToricDivisor.prime(p1_x_p1(), (1, 0)), fan),
                 pullback(ToricDivisor.prime(p1_x_p1(), (0, 1)), fan),
                 ToricDivisor.prime(fan, (1, 1))]
        return SurfaceLattice.from_fan(fan, basis, name)
    raise KeyError(f"unknown surface {name!r}")


FIXTURES = ("p2", "p1xp1", "bl1p2", "bl2p2", "bl3p2", "f0", "f1", "f2", "f3", "bl1p1xp1")


# -- Zariski decomposition -------------------------------------------------------------------

@dataclass(frozen=True)
class Zariski:
    positive: tuple
    negative: tuple
    support: tuple  # curves in the negative part
    coefficients: tuple  # their multiplicities

    @property
    def vol(self) -> Fraction:
        return self._vol

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"P": to_jsonable(self.positive), "N": to_jsonable(self.negative),
                "support": to_jsonable(self.support), "coefficients": to_jsonable(self.coefficients),
                "vol": to_jsonable(self._vol)}


def _negative_supports(S: SurfaceLattice):
    curves = S.curves
    yield ()
    for k in range(1, len(curves) + 1):
        for sub in combinations(curves, k):
            g = [[S.dot(a, b) for b in sub] for a in sub]
            if signature(g)[2] == k:
                yield sub


def zariski(S: SurfaceLattice, x) -> Zariski:
    """x = P + N with P nef, N >= 0 supported on curves orthogonal to P, negative definite."""
    x = la.vec(x)
    if not S.is_psef(x):
        raise GeometryError(f"{x} is not pseudo-effective")
    for sub in _negative_supports(S):
        if sub:
            g = [[S.dot(a, b) for b in sub] for a in sub]
            n = la.solve(g, [S.dot(x, c) for c in sub])
            if n is None or any(c <= 0 for c in n):
                continue
        else:
            n = ()
        P = x
        for c, cur in zip(n, sub):
            P = la.sub(P, la.scale(c, cur))
        if S.is_nef(P):
            z = Zariski(P, la.sub(x, P), tuple(sub), tuple(n))
            object.__setattr__(z, "_vol", S.dot(P, P))
            return z
    raise GeometryError(f"no Zariski chamber found for {x}")  # impossible for psef x


def vol(S: SurfaceLattice, x) -> Fraction:
    """P^2 for the positive part; zero off the pseudo-effective cone."""
    if not S.is_psef(x):
        return Fraction(0)
    return zariski(S, x).vol


def psi(S: SurfaceLattice, x) -> tuple:
    """Positive intersection product of a big class (the Zariski positive part on a surface)."""
    z = zariski(S, x)
    if z.vol <= 0:
        raise GeometryError(f"{tuple(x)} is not big")
    return z.positive


def chamber(S: SurfaceLattice, x) -> tuple:
    return zariski(S, x).support


# -- differentiability ------------------------------------------------------------------------

@dataclass(frozen=True)
class DvolReport:
    same_chamber: bool
    quotient: Fraction | None
    expected: Fraction
    one_sided: tuple | None
    holds: bool | None

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {k: to_jsonable(v) for k, v in self.__dict__.items()}


def dvol_check(S: SurfaceLattice, alpha, gamma, t) -> DvolReport:
    """Symmetric difference quotient of vol against 2 psi(alpha).gamma inside one chamber."""
    t = Fraction(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    alpha, gamma = la.vec(alpha), la.vec(gamma)
    p = psi(S, alpha)
    expected = 2 * S.dot(p, gamma)
    up, down = la.add(alpha, la.scale(t, gamma)), la.sub(alpha, la.scale(t, gamma))
    sup = {chamber(S, y) if S.is_psef(y) else None for y in (alpha, up, down)}
    v0, vu, vd = vol(S, alpha), vol(S, up), vol(S, down)
    if len(sup) == 1:
        q = (vu - vd) / (2 * t)
        return DvolReport(True, q, expected, None, q == expected)
    return DvolReport(False, None, expected, ((vu - v0) / t, (v0 - vd) / t), None)


# -- duality and approximation ------------------------------------------------------------------

@dataclass(frozen=True)
class SandwichReport:
    right_inclusion: tuple  # (x, psi(x), pairings ok)
    fixed_points: tuple  # (c, status) with status "fixed" | "boundary" | "not fixed"

    @property
    def holds(self) -> bool:
        return all(ok for _, _, ok in self.right_inclusion) and all(s != "not fixed" for _, s in self.fixed_points)

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"right_inclusion": to_jsonable(self.right_inclusion),
                "fixed_points": to_jsonable(self.fixed_points), "holds": self.holds}


def duality_sandwich_check(S: SurfaceLattice, big_samples: Sequence, dual_samples: Sequence) -> SandwichReport:
    right = []
    for x in big_samples:
        p = psi(S, x)
        right.append((la.vec(x), p, all(S.dot(p, e) >= 0 for e in S.eff_gens)))
    fixed = []
    for c in dual_samples:
        c = la.vec(c)
        if not S.is_ample(c):
            fixed.append((c, "boundary"))
            continue
        fixed.append((c, "fixed" if psi(S, c) == c else "not fixed"))
    return SandwichReport(tuple(right), tuple(fixed))


@dataclass(frozen=True)
class FujitaResult:
    A: tuple
    t: Fraction
    m: int
    vol_A: Fraction
    vol_x: Fraction

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {k: to_jsonable(v) for k, v in self.__dict__.items()}


def fujita_approx(S: SurfaceLattice, x, eps) -> FujitaResult:
    """Ample A with x - A pseudo-effective and vol(A) >= (1 - eps) vol(x).

    A = (1 - t) P + (t / m) h with P = psi(x) and h the sum of the nef
    generators; m doubles until P - h / m is pseudo-effective, then t halves
    until the volume bound holds.
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    x = la.vec(x)
    P = psi(S, x)
    vx = S.dot(P, P)
    h = tuple(sum((g[i] for g in S.nef_gens), Fraction(0)) for i in range(S.rank))
    if not S.is_ample(h):
        raise GeometryError("sum of nef generators is not ample")
    m = 1
    while not S.is_psef(la.sub(P, la.scale(Fraction(1, m), h))):
        m *= 2
        if m > 2 ** 40:
            raise GeometryError("no ample class below x")
    t = Fraction(1, 2)
    while True:
        A = la.add(la.scale(1 - t, P), la.scale(t / m, h))
        vA = S.dot(A, A)
        if vA >= (1 - eps) * vx:
            break
        t /= 2
    assert S.is_ample(A) and S.is_psef(la.sub(x, A))
    return FujitaResult(A, t, m, vA, vx)


# -- volume bounds ---------------------------------------------------------------------------------

def _require_nef(S: SurfaceLattice, **classes):
    for name, c in classes.items():
        if not S.is_nef(c):
            raise GeometryError(f"{name} = {tuple(c)} is not nef")


def bound_2215_check(S: SurfaceLattice, A, B) -> bool:
    """vol(A - B) >= vol(A) - 2 (A.B) for nef A, B."""
    _require_nef(S, A=A, B=B)
    A, B = la.vec(A), la.vec(B)
    return vol(S, la.sub(A, B)) >= S.dot(A, A) - 2 * S.dot(A, B)


def bound_15cor_check(S: SurfaceLattice, beta, gamma, omega, t) -> bool:
    """vol(beta + t gamma) >= beta^2 + 2 t beta.gamma - 64 omega^2 t^2."""
    t = Fraction(t)
    beta, gamma, omega = la.vec(beta), la.vec(gamma), la.vec(omega)
    if not -1 <= t <= 1:
        raise GeometryError(f"t = {t} outside [-1, 1]")
    _require_nef(S, beta=beta, omega=omega, omega_plus_gamma=la.add(omega, gamma),
                 omega_minus_gamma=la.sub(omega, gamma))
    if S.dot(omega, omega) <= 0:
        raise GeometryError("omega is not big")
    if not S.is_psef(la.sub(omega, beta)):
        raise GeometryError("omega - beta is not pseudo-effective")
    rhs = S.dot(beta, beta) + 2 * t * S.dot(beta, gamma) - 64 * S.dot(omega, omega) * t * t
    return vol(S, la.add(beta, la.scale(t, gamma))) >= rhs


def monotone_product_check(S: SurfaceLattice, c1, c2, d1, d2) -> bool:
    """c1.c2 <= d1.d2 for nef classes with d_i - c_i pseudo-effective."""
    _require_nef(S, c1=c1, c2=c2, d1=d1, d2=d2)
    for c, d in ((c1, d1), (c2, d2)):
        if not S.is_psef(la.sub(la.vec(d), la.vec(c))):
            raise GeometryError(f"{tuple(d)} - {tuple(c)} is not pseudo-effective")
    return S.dot(c1, c2) <= S.dot(d1, d2)


def load_surface(doc: Mapping) -> SurfaceLattice:
    """Surface from a config table: either {name} or {gram, eff[, nef]}."""
    if "name" in doc and "gram" not in doc:
        return fixture(doc["name"])
    from fractions import Fraction as F
    gram = [[F(str(x)) for x in r] for r in doc["gram"]]
    eff = [[F(str(x)) for x in r] for r in doc["eff"]]
    nef = [[F(str(x)) for x in r] for r in doc.get("nef", [])]
    return SurfaceLattice(GramMatrix(gram), tuple(map(tuple, eff)), tuple(map(tuple, nef)), doc.get("name", ""))
