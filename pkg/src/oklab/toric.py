"""Complete fans, torus-invariant divisors as piecewise-linear functions, and their sections.

A divisor D = sum a_rho D_rho is stored by its ray coefficients.  On each
maximal cone sigma there is a linear form m_sigma with <m_sigma, v_rho> = -a_rho
for the rays of sigma; ``phi`` is that piecewise-linear function and ``order``
is its negative, the order of vanishing along the divisorial valuation of a
lattice direction.  Sections of O(D) are the lattice points of
P_D = {u : <u, v_rho> >= -a_rho}.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

import sympy

from . import linalg as la
from .exactgeom import (ConeGen, GeometryError, Polytope, double_description,
                        full_volume, polytope_from_inequalities)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


# -- fans -------------------------------------------------------------------

def _cone_meet(a: ConeGen, b: ConeGen) -> ConeGen:
    """Intersection of two cones, via their inequalities."""
    lin, rays = double_description(list(a.inequalities) + list(b.inequalities), a.dim)
    gens = list(rays) + list(lin) + [tuple(-x for x in l) for l in lin]
    return ConeGen(tuple(gens), a.dim)


def _angle_key(v):
    """Sort key putting planar vectors in counterclockwise order from the positive x-axis."""
    x, y = v
    return (0 if (y > 0 or (y == 0 and x > 0)) else 1)


def _ccw_cmp(u, v) -> int:
    hu, hv = _angle_key(u), _angle_key(v)
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


@dataclass(frozen=True)
class Fan:
    """Complete rational fan given by primitive rays and maximal cones (ray-index sets)."""

    rays: tuple
    cones: tuple

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        if not rays:
            raise GeometryError("a fan needs rays")
        n = len(rays[0])
        for r in rays:
            if len(r) != n:
                raise GeometryError("rays of mixed dimension")
            if la.primitive(r) != r:
                raise GeometryError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise GeometryError("repeated ray")
        cones = tuple(sorted(tuple(sorted(int(i) for i in c)) for c in self.cones))
        if any(i < 0 or i >= len(rays) for c in cones for i in c):
            raise GeometryError("cone refers to a missing ray")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "cones", cones)
        if n <= 3:
            self._validate()

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    def cone(self, idx) -> ConeGen:
        return ConeGen.of([self.rays[i] for i in idx], self.dim)

    def _validate(self):
        n = self.dim
        cones = [self.cone(c) for c in self.cones]
        for c, idx in zip(cones, self.cones):
            if not c.is_pointed:
                raise GeometryError(f"cone {idx} is not salient")
            if c.linear_span_dim != n:
                raise GeometryError(f"maximal cone {idx} is not full-dimensional; fan is not complete")
            if set(c.generators) != {la.primitive(self.rays[i]) for i in idx}:
                raise GeometryError(f"cone {idx} lists a ray that is not extremal")
        for (i, a), (j, b) in combinations(list(zip(self.cones, cones)), 2):
            common = sorted(set(i) & set(j))
            meet = _cone_meet(a, b)
            face = self.cone(common) if common else ConeGen((), n)
            if not meet.same_set(face):
                raise GeometryError(f"cones {i} and {j} do not meet in a common face")
        # every facet of every maximal cone must be shared by exactly two maximal cones
        for idx in self.cones:
            for facet in self._facets_of(idx):
                owners = [c for c in self.cones if set(facet) <= set(c)]
                if len(owners) != 2:
                    raise GeometryError(f"facet {facet} lies on the boundary; fan is not complete")

    def _facets_of(self, idx) -> list[tuple]:
        """Ray-index sets of the facets of a full-dimensional cone."""
        c = self.cone(idx)
        out = []
        for h in c.inequalities:
            on = tuple(i for i in idx if la.dot(h, self.rays[i]) == 0)
            out.append(on)
        return out

    @cached_property
    def walls(self) -> tuple:
        """(cone_a, cone_b, shared facet) for adjacent maximal cones."""
        out = []
        for a, b in combinations(range(len(self.cones)), 2):
            common = tuple(sorted(set(self.cones[a]) & set(self.cones[b])))
            if common and la.rank([self.rays[i] for i in common]) == self.dim - 1:
                out.append((a, b, common))
        return tuple(out)

    def cone_containing(self, x) -> int:
        """Index of a maximal cone containing x (lowest index on shared faces)."""
        for k, idx in enumerate(self.cones):
            if self.cone(idx).contains(x):
                return k
        raise GeometryError(f"{x} lies in no cone; fan is not complete")

    def refines(self, other: "Fan") -> bool:
        """Every cone of self lies in some cone of other (same support)."""
        return all(any(other.cone(c2).contains(la.vec(self.cone(c1).relative_interior_point()))
                       and all(other.cone(c2).contains(self.rays[i]) for i in c1)
                       for c2 in other.cones)
                   for c1 in self.cones)

    def ray_index(self, v) -> int:
        return self.rays.index(tuple(int(x) for x in v))

    # constructors
    @classmethod
    def complete_planar(cls, rays: Iterable[Sequence[int]]) -> "Fan":
        """Fan whose maximal cones are spanned by angularly consecutive rays."""
        rays = [tuple(int(x) for x in r) for r in rays]
        if any(len(r) != 2 for r in rays):
            raise GeometryError("planar constructor needs 2-dimensional rays")
        order = sorted(range(len(rays)), key=functools.cmp_to_key(lambda i, j: _ccw_cmp(rays[i], rays[j])))
        cones = [(order[k], order[(k + 1) % len(order)]) for k in range(len(order))]
        return cls(tuple(rays), tuple(cones))

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Fan":
        return cls(tuple(tuple(r) for r in doc["rays"]), tuple(tuple(c) for c in doc["cones"]))


def projective_line() -> Fan:
    return Fan(((1,), (-1,)), ((0,), (1,)))


def projective_plane() -> Fan:
    return Fan.complete_planar([(1, 0), (0, 1), (-1, -1)])


def p1_x_p1() -> Fan:
    return Fan.complete_planar([(1, 0), (0, 1), (-1, 0), (0, -1)])


def hirzebruch(n: int) -> Fan:
    return Fan.complete_planar([(1, 0), (0, 1), (-1, n), (0, -1)])


def blowup_fan(fan: Fan, cone: Sequence[int]) -> Fan:
    """Stellar subdivision of a smooth planar cone at the sum of its rays."""
    if fan.dim != 2:
        raise GeometryError("blowups are implemented for planar fans")
    idx = tuple(sorted(cone))
    if idx not in fan.cones or len(idx) != 2:
        raise GeometryError(f"{cone} is not a maximal cone")
    a, b = (fan.rays[i] for i in idx)
    if abs(a[0] * b[1] - a[1] * b[0]) != 1:
        raise GeometryError(f"cone {idx} is not smooth")
    new = (a[0] + b[0], a[1] + b[1])
    k = len(fan.rays)
    cones = [c for c in fan.cones if c != idx] + [(idx[0], k), (idx[1], k)]
    return Fan(fan.rays + (new,), tuple(cones))


def blown_up_plane(k: int) -> Fan:
    """P^2 blown up at k <= 3 torus-fixed points, new rays appended in order."""
    fan = projective_plane()
    for step in range(k):
        a, b = [((1, 0), (0, 1)), ((0, 1), (-1, -1)), ((-1, -1), (1, 0))][step]
        fan = blowup_fan(fan, (fan.ray_index(a), fan.ray_index(b)))
    return fan


# -- divisors -----------------------------------------------------------------

@dataclass(frozen=True)
class ToricDivisor:
    """sum a_rho D_rho on a complete fan; coefficients rational."""

    fan: Fan
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != len(self.fan.rays):
            raise ValueError(f"{len(coeffs)} coefficients for {len(self.fan.rays)} rays")
        object.__setattr__(self, "coeffs", coeffs)
        self.cone_forms  # fails early when D is not Q-Cartier

    @classmethod
    def prime(cls, fan: Fan, ray) -> "ToricDivisor":
        i = fan.ray_index(ray)
        return cls(fan, tuple(int(j == i) for j in range(len(fan.rays))))

    @cached_property
    def cone_forms(self) -> tuple:
        """m_sigma per maximal cone, with <m_sigma, v_rho> = -a_rho on its rays."""
        out = []
        for idx in self.fan.cones:
            a = [self.fan.rays[i] for i in idx]
            b = [-self.coeffs[i] for i in idx]
            m = la.solve(a, b)
            if m is None:
                raise GeometryError(f"divisor is not Q-Cartier on cone {idx}")
            out.append(m)
        return tuple(out)

    def phi(self, x) -> Fraction:
        k = self.fan.cone_containing(x)
        return la.dot(self.cone_forms[k], la.vec(x))

    def order(self, x) -> Fraction:
        """-phi(x); equals a_rho at the ray v_rho."""
        return -self.phi(x)

    def __add__(self, other: "ToricDivisor") -> "ToricDivisor":
        self._same_fan(other)
        return ToricDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "ToricDivisor":
        return ToricDivisor(self.fan, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "ToricDivisor") -> "ToricDivisor":
        return self + (-other)

    def scale(self, c) -> "ToricDivisor":
        c = Fraction(c)
        return ToricDivisor(self.fan, tuple(c * a for a in self.coeffs))

    def _same_fan(self, other: "ToricDivisor"):
        if self.fan != other.fan:
            raise ValueError("divisors live on different fans")

    def leq(self, other: "ToricDivisor") -> bool:
        self._same_fan(other)
        return all(a <= b for a, b in zip(self.coeffs, other.coeffs))

    def to_json(self) -> dict:
        return {"fan": self.fan.to_json(), "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "ToricDivisor":
        from .serialize import unrat
        return cls(Fan.from_json(doc["fan"]), tuple(unrat(c) for c in doc["coeffs"]))


def pullback(D: ToricDivisor, fan: Fan) -> ToricDivisor:
    """Pull D back to a refinement by reading its order function on the new rays."""
    if not fan.refines(D.fan):
        raise GeometryError("target fan does not refine the divisor's fan")
    return ToricDivisor(fan, tuple(D.order(r) for r in fan.rays))


def is_nef(D: ToricDivisor) -> bool:
    """phi_D convex across every wall: <m_sigma, v> >= -a_v for the far rays of each neighbour."""
    return all(x >= 0 for x in _wall_slacks(D))


def is_ample(D: ToricDivisor) -> bool:
    return all(x > 0 for x in _wall_slacks(D))


def _wall_slacks(D: ToricDivisor) -> list[Fraction]:
    fan = D.fan
    out = []
    for a, b, common in fan.walls:
        for s, t in ((a, b), (b, a)):
            for i in fan.cones[t]:
                if i not in common:
                    out.append(la.dot(D.cone_forms[s], la.vec(fan.rays[i])) + D.coeffs[i])
    return out


# -- sections ---------------------------------------------------------------------

def section_polytope(D: ToricDivisor) -> Polytope:
    """P_D = {u : <u, v_rho> >= -a_rho}; raises when P_D is empty or unbounded."""
    P = polytope_from_inequalities(D.fan.rays, [-a for a in D.coeffs], D.fan.dim)
    if P is None:
        raise GeometryError("divisor has no sections")
    return P


def h0(D: ToricDivisor, m: int = 1) -> int:
    """Number of lattice points of P_{mD}."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return 1
    try:
        P = section_polytope(D.scale(m))
    except GeometryError as err:
        if "no sections" in str(err):
            return 0
        raise
    return len(P.lattice_points())


def volume_sections(D: ToricDivisor, m_max: int) -> tuple[Fraction, Fraction]:
    """(d! h0(m_max D) / m_max^d, d! vol(P_D)): the section-growth estimate and its limit."""
    if m_max < 1:
        raise ValueError("m_max must be positive")
    d = D.fan.dim
    est = Fraction(factorial(d) * h0(D, m_max), m_max ** d)
    try:
        limit = factorial(d) * full_volume(section_polytope(D))
    except GeometryError as err:
        if "no sections" not in str(err):
            raise
        limit = Fraction(0)
    return est, limit


# -- intersection numbers on complete planar fans -------------------------------------

def intersection_matrix(fan: Fan) -> list[list[Fraction]]:
    """D_i . D_j for the ray divisors of a complete simplicial planar fan."""
    if fan.dim != 2:
        raise GeometryError("intersection numbers are implemented for surfaces")
    k = len(fan.rays)
    M = [[Fraction(0)] * k for _ in range(k)]
    for i, j in fan.cones:
        a, b = fan.rays[i], fan.rays[j]
        M[i][j] = M[j][i] = Fraction(1, abs(a[0] * b[1] - a[1] * b[0]))
    # sum_rho <m, v_rho> D_rho is principal, hence orthogonal to every D_i
    for i in range(k):
        m = (1, 0) if fan.rays[i][0] != 0 else (0, 1)
        pi = la.dot(m, fan.rays[i])
        M[i][i] = -sum((la.dot(m, fan.rays[r]) * M[i][r] for r in range(k) if r != i), Fraction(0)) / pi
    return M


def intersect(D1: ToricDivisor, D2: ToricDivisor) -> Fraction:
    D1._same_fan(D2)
    M = intersection_matrix(D1.fan)
    return sum((a * M[i][j] * b for i, a in enumerate(D1.coeffs) for j, b in enumerate(D2.coeffs)), Fraction(0))


# -- stable meet and join ----------------------------------------------------------------

def stable_meet(D1: ToricDivisor, D2: ToricDivisor) -> tuple[Fan, ToricDivisor]:
    """Coarsest refinement on which min(order_D1, order_D2) is linear per cone, and that divisor.

    A cone is cut along {order_D1 = order_D2} only where the difference
    changes sign on its rays.
    """
    D1._same_fan(D2)
    fan = D1.fan
    n = fan.dim
    new_rays = list(fan.rays)
    pieces = []
    for k, idx in enumerate(fan.cones):
        diff = la.sub(D2.cone_forms[k], D1.cone_forms[k])  # order1 - order2
        vals = [la.dot(diff, la.vec(fan.rays[i])) for i in idx]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            pieces.append(ConeGen.of([fan.rays[i] for i in idx], n))
            continue
        base = list(fan.cone(idx).inequalities)
        for sign in (1, -1):
            h = tuple(sign * x for x in la.primitive(diff))
            lin, rays = double_description(base + [h], n)
            assert not lin
            pieces.append(ConeGen.of([la.primitive(r) for r in rays], n))
    cones = []
    for piece in pieces:
        idx = []
        for g in piece.generators:
            g = tuple(int(x) for x in g)
            if g not in new_rays:
                new_rays.append(g)
            idx.append(new_rays.index(g))
        cones.append(tuple(idx))
    refined = Fan(tuple(new_rays), tuple(cones))
    meet = ToricDivisor(refined, tuple(min(D1.order(r), D2.order(r)) for r in refined.rays))
    return refined, meet


def stable_join(D1: ToricDivisor, D2: ToricDivisor) -> tuple[Fan, ToricDivisor]:
    refined, m = stable_meet(-D1, -D2)
    return refined, -m


# -- Hilbert functions of monomial ideals -----------------------------------------------

@dataclass(frozen=True)
class MonomialIdeal:
    """Ideal of k[x_1..x_nvars] generated by monomials, stored as a minimal antichain."""

    nvars: int
    generators: tuple

    def __post_init__(self):
        gens = {tuple(int(e) for e in g) for g in self.generators}
        if any(len(g) != self.nvars or min(g, default=0) < 0 for g in gens):
            raise ValueError("exponent vectors must be nonnegative of length nvars")
        minimal = sorted(g for g in gens
                         if not any(h != g and all(a <= b for a, b in zip(h, g)) for h in gens))
        object.__setattr__(self, "generators", tuple(minimal))

    def contains(self, mono) -> bool:
        return any(all(a <= b for a, b in zip(g, mono)) for g in self.generators)


def _monomials(nvars: int, deg: int):
    if nvars == 1:
        yield (deg,)
        return
    for first in range(deg, -1, -1):
        for rest in _monomials(nvars - 1, deg - first):
            yield (first,) + rest


def hilbert_function_bruteforce(I: MonomialIdeal, n: int) -> int:
    """Count degree-n monomials outside I directly."""
    return sum(1 for m in _monomials(I.nvars, n) if not I.contains(m))


def hilbert_function(I: MonomialIdeal, n: int) -> int:
    """dim (R/I)_n by inclusion-exclusion over lcms of generator subsets."""
    N = I.nvars
    total = 0
    for k in range(len(I.generators) + 1):
        for sub in combinations(I.generators, k):
            d = sum(max(col) for col in zip(*sub)) if sub else 0
            if n - d >= 0:
                total += (-1) ** k * comb(n - d + N - 1, N - 1)
    return total


def hilbert_polynomial(I: MonomialIdeal) -> sympy.Poly:
    """The polynomial agreeing with the Hilbert function for all large n."""
    N = I.nvars
    n = sympy.Symbol("n")
    expr = sympy.Integer(0)
    for k in range(len(I.generators) + 1):
        for sub in combinations(I.generators, k):
            d = sum(max(col) for col in zip(*sub)) if sub else 0
            term = sympy.Integer(1)
            for j in range(1, N):
                term *= (n - d + j)
            expr += (-1) ** k * term / sympy.factorial(N - 1)
    return sympy.Poly(sympy.expand(expr), n, domain="QQ")


def hilbert_degree(I: MonomialIdeal) -> tuple[int, int]:
    """(dimension of Proj(R/I), degree); (-1, 0) when the projective scheme is empty."""
    if any(not any(g) for g in I.generators):
        raise ValueError("the ideal is the whole ring")
    p = hilbert_polynomial(I)
    if p.is_zero:
        return -1, 0
    e = p.degree()
    lead = Fraction(str(p.LC())) * factorial(e)
    assert lead.denominator == 1
    return e, int(lead)


# -- scene files ----------------------------------------------------------------------------

def load_scene(path) -> tuple[Fan, ToricDivisor | None]:
    """Read [fan] rays/cones and an optional [divisor] coeffs table from TOML."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return scene_from_dict(doc)


def scene_from_dict(doc: Mapping) -> tuple[Fan, ToricDivisor | None]:
    f = doc["fan"]
    if "cones" in f:
        fan = Fan(tuple(tuple(r) for r in f["rays"]), tuple(tuple(c) for c in f["cones"]))
    else:
        fan = Fan.complete_planar(f["rays"])
    D = None
    if "divisor" in doc:
        D = ToricDivisor(fan, tuple(Fraction(str(c)) for c in doc["divisor"]["coeffs"]))
    return fan, D
