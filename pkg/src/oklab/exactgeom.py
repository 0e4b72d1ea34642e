"""Exact polyhedral geometry: cones, duals, hulls, triangulations and volumes.

Everything is ``Fraction``-valued.  Cones are stored as generator lists in
canonical form (primitive integer rays, sorted, no duplicates); the
H-representation is derived on demand with the double description method.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import factorial, floor, ceil
from typing import Iterable, Sequence

from . import linalg as la
from .lp import linprog


class GeometryError(ValueError):
    pass


class RieszInfeasible(GeometryError):
    """A Riesz extension precondition failed; ``witness`` is the offending vector."""

    def __init__(self, reason: str, witness):
        super().__init__(f"{reason} fails at {tuple(str(x) for x in witness)}")
        self.reason = reason
        self.witness = witness


# -- double description ----------------------------------------------------

def double_description(ineqs: Sequence[Sequence], n: int):
    """Convert {y : a.y >= 0 for a in ineqs} into (lineality basis, extreme rays).

    Incremental DD with the combinatorial adjacency test.  Lineality is kept
    separately, so rays describe the pointed part only.
    """
    lin = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    rays: list[tuple] = []
    zs: list[frozenset] = []
    done: list[int] = []
    for idx, a in enumerate(ineqs):
        a = la.vec(a)
        if la.is_zero(a):
            continue
        vals = [la.dot(a, l) for l in lin]
        j = next((i for i, v in enumerate(vals) if v != 0), None)
        if j is not None:
            l0, v0 = lin[j], vals[j]
            if v0 < 0:
                l0, v0 = la.scale(-1, l0), -v0
            lin = [la.sub(l, la.scale(vl / v0, l0)) for i, (l, vl) in enumerate(zip(lin, vals)) if i != j]
            rays = [la.sub(r, la.scale(la.dot(a, r) / v0, l0)) for r in rays]
            rays = [la.vec(la.primitive(r)) for r in rays]
            zs = [z | {idx} for z in zs]
            rays.append(la.vec(la.primitive(l0)))
            zs.append(frozenset(done))
            done.append(idx)
            continue
        s = [la.dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(s) if v > 0]
        neg = [i for i, v in enumerate(s) if v < 0]
        zer = [i for i, v in enumerate(s) if v == 0]
        new_rays = [rays[i] for i in pos + zer]
        new_zs = [zs[i] for i in pos] + [zs[i] | {idx} for i in zer]
        for p in pos:
            for q in neg:
                common = zs[p] & zs[q]
                if any(r != p and r != q and common <= zs[r] for r in range(len(rays))):
                    continue
                r = la.add(la.scale(s[p], rays[q]), la.scale(-s[q], rays[p]))
                new_rays.append(la.vec(la.primitive(r)))
                new_zs.append(common | {idx})
        rays, zs = new_rays, new_zs
        done.append(idx)
    return lin, rays


def _canonical_lineality(lin, n):
    if not lin:
        return []
    rows = la.row_space_basis(lin)
    return [la.primitive(r) for r in rows]


def _project_off(r, lin):
    """Orthogonal projection of r onto the complement of span(lin)."""
    if not lin:
        return r
    gram = [[la.dot(a, b) for b in lin] for a in lin]
    coef = la.solve(gram, [la.dot(a, r) for a in lin])
    out = r
    for c, a in zip(coef, lin):
        out = la.sub(out, la.scale(c, a))
    return out


def _canonical(gens) -> tuple:
    prims = {la.primitive(g) for g in gens}
    prims = {p for p in prims if any(p)}
    return tuple(sorted(prims))


# -- cones -----------------------------------------------------------------

@dataclass(frozen=True)
class ConeGen:
    """Rational polyhedral cone given by generators (nonnegative combinations)."""

    generators: tuple
    dim: int

    def __post_init__(self):
        gens = tuple(tuple(g) for g in self.generators)
        for g in gens:
            if len(g) != self.dim:
                raise GeometryError(f"generator {g} has dimension {len(g)}, expected {self.dim}")
        object.__setattr__(self, "generators", _canonical(gens))

    @classmethod
    def of(cls, gens: Iterable[Sequence], dim: int | None = None) -> "ConeGen":
        gens = [tuple(g) for g in gens]
        if dim is None:
            if not gens:
                raise GeometryError("dimension required for an empty generator list")
            dim = len(gens[0])
        return cls(tuple(gens), dim)

    @cached_property
    def _hrep(self):
        """(lineality, rays) of the dual cone."""
        lin, rays = double_description(self.generators, self.dim)
        lin = _canonical_lineality(lin, self.dim)
        rays = [la.primitive(_project_off(la.vec(r), [la.vec(l) for l in lin])) for r in rays]
        return lin, rays

    @cached_property
    def inequalities(self) -> tuple:
        """Normals h with h.x >= 0 cutting out the cone (dual generators)."""
        lin, rays = self._hrep
        return _canonical(list(rays) + list(lin) + [tuple(-x for x in l) for l in lin])

    def contains(self, x) -> bool:
        x = la.vec(x)
        if len(x) != self.dim:
            raise GeometryError("dimension mismatch")
        return all(la.dot(h, x) >= 0 for h in self.inequalities)

    def dual(self) -> "ConeGen":
        return dual_cone(self)

    def minimal(self) -> "ConeGen":
        """Canonical irredundant generators: lineality basis (both signs) plus extreme rays of the pointed part."""
        return dual_cone(dual_cone(self))

    @cached_property
    def lineality(self) -> list:
        lin, _ = double_description(self.inequalities, self.dim)
        return _canonical_lineality(lin, self.dim)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @cached_property
    def linear_span_dim(self) -> int:
        return la.rank(self.generators) if self.generators else 0

    def same_set(self, other: "ConeGen") -> bool:
        return (self.dim == other.dim
                and all(other.contains(g) for g in self.generators)
                and all(self.contains(g) for g in other.generators))

    def relative_interior_point(self):
        """Sum of generators, which lies in the relative interior."""
        out = tuple(Fraction(0) for _ in range(self.dim))
        for g in self.generators:
            out = la.add(out, la.vec(g))
        return out


def dual_cone(c: ConeGen) -> ConeGen:
    """{y : y.x >= 0 for all x in c}, in canonical minimal form."""
    lin, rays = c._hrep
    gens = list(rays) + list(lin) + [tuple(-x for x in l) for l in lin]
    return ConeGen(tuple(gens), c.dim)


def interior_contains(dual_of: ConeGen, c) -> bool:
    """Whether c is interior to the dual of the cone generated by ``dual_of``.

    c is interior iff c.d > 0 for every nonzero generator d.
    """
    c = la.vec(c)
    if len(c) != dual_of.dim:
        raise GeometryError(f"dimension mismatch: {len(c)} vs {dual_of.dim}")
    return all(la.dot(c, d) > 0 for d in dual_of.generators)


@dataclass(frozen=True)
class LinMap:
    matrix: tuple

    def __post_init__(self):
        rows = tuple(la.vec(r) for r in self.matrix)
        if rows and len({len(r) for r in rows}) != 1:
            raise GeometryError("ragged matrix")
        object.__setattr__(self, "matrix", rows)

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def __call__(self, x):
        return la.matvec(self.matrix, la.vec(x))

    @property
    def is_surjective(self) -> bool:
        return la.rank(self.matrix) == self.rows


@dataclass(frozen=True)
class ConeProjection:
    cone: ConeGen
    surjective: bool
    interior_meets_kernel: bool


def project_cone(L: LinMap, c: ConeGen) -> ConeProjection:
    """Image of a cone under a linear map.

    When a relative-interior point of c lies in ker L the image is a linear
    subspace (the full codomain if L is surjective and c is full-dimensional).
    """
    if L.cols != c.dim:
        raise GeometryError("map and cone dimensions disagree")
    images = [L(g) for g in c.generators]
    meets = False
    if c.generators:
        # strictly positive combination in ker L, scaled so every weight >= 1
        k = len(c.generators)
        a_eq = [[images[t][r] for t in range(k)] for r in range(L.rows)]
        res = linprog([0] * k, A_eq=a_eq, b_eq=[0] * L.rows,
                      A_ub=[[-int(i == j) for j in range(k)] for i in range(k)], b_ub=[-1] * k)
        meets = res.status == "optimal"
    return ConeProjection(ConeGen(tuple(images), L.rows).minimal(), L.is_surjective, meets)


def riesz_extend(dimV: int, P: ConeGen, U: Sequence[Sequence], h: Sequence) -> tuple:
    """Extend a functional given on span(U) to one nonnegative on P.

    Preconditions (checked, raising ``RieszInfeasible`` with a witness):
    h >= 0 on P ∩ span(U), and every generator v of P is dominated by some
    w in span(U) with w - v in P.
    """
    U = [la.vec(u) for u in U]
    h = la.vec(h)
    if P.dim != dimV or any(len(u) != dimV for u in U) or len(h) != len(U):
        raise GeometryError("dimension mismatch")
    if U and la.rank(U) != len(U):
        raise GeometryError("U must be linearly independent")
    # positivity on P ∩ span(U)
    comp = la.nullspace(U, dimV) if U else [tuple(Fraction(int(i == j)) for j in range(dimV)) for i in range(dimV)]
    rows = list(P.inequalities) + [tuple(e) for e in comp] + [la.scale(-1, e) for e in comp]
    lin, rays = double_description(rows, dimV)

    def h_of(w):
        coef = la.solve(la.transpose(U), w) if U else ()
        return la.dot(coef, h) if U else Fraction(0)

    for l in lin:
        if h_of(l) != 0:
            raise RieszInfeasible("positivity", l)
    for r in rays:
        if h_of(r) < 0:
            raise RieszInfeasible("positivity", r)
    gens = [la.vec(g) for g in P.generators]
    k, nu = len(gens), len(U)
    # domination: sum c_j u_j - v = sum lam_i p_i, c free, lam >= 0
    for v in gens:
        a_eq = [[U[j][r] for j in range(nu)] + [-gens[i][r] for i in range(k)] for r in range(dimV)]
        res = linprog([0] * (nu + k), A_eq=a_eq, b_eq=list(v), free=range(nu))
        if res.status != "optimal":
            raise RieszInfeasible("domination", v)
    a_eq = [list(u) for u in U]
    a_ub = [[-x for x in g] for g in gens]
    res = linprog([0] * dimV, A_eq=a_eq, b_eq=list(h), A_ub=a_ub, b_ub=[0] * k, free=range(dimV))
    if res.status != "optimal":
        raise RieszInfeasible("extension", tuple(Fraction(0) for _ in range(dimV)))
    H = res.x
    assert all(la.dot(H, u) == hv for u, hv in zip(U, h))
    assert all(la.dot(H, g) >= 0 for g in gens)
    return H


# -- polytopes -------------------------------------------------------------

def _affine_frame(points):
    """(origin, direction rows in rref, pivot columns) of the affine hull."""
    p0 = points[0]
    diffs = [la.sub(p, p0) for p in points[1:]]
    rows, pivots = la.rref(diffs, len(p0)) if diffs else ([], [])
    return p0, [tuple(r) for r in rows], pivots


def _local(x, p0, pivots):
    return tuple(x[j] - p0[j] for j in pivots)


def _facets_local(coords, k):
    """Facet inequalities (h0, h) with h0 + h.y >= 0 of a full-dimensional point set in Q^k."""
    if k == 0:
        return []
    lifted = [(Fraction(1),) + tuple(y) for y in coords]
    lin, rays = double_description(lifted, k + 1)
    assert not lin, "lifted cone over a full-dimensional polytope has pointed dual"
    return [tuple(r) for r in rays]


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many rational points, stored by its vertices."""

    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise GeometryError("empty polytope")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def _frame(self):
        return _affine_frame(list(self.vertices))

    @property
    def affine_dim(self) -> int:
        return len(self._frame[1])

    @property
    def is_full_dim(self) -> bool:
        return self.affine_dim == self.dim

    @cached_property
    def equations(self) -> tuple:
        """(normal, value) pairs with normal.x == value on the affine hull."""
        p0, rows, _ = self._frame
        if not rows:
            comp = [tuple(Fraction(int(i == j)) for j in range(self.dim)) for i in range(self.dim)]
        else:
            comp = la.nullspace(rows, self.dim)
        return tuple((la.vec(la.primitive(e)), la.dot(la.vec(la.primitive(e)), p0)) for e in comp)

    @cached_property
    def facets(self) -> tuple:
        """(normal, offset) pairs with normal.x >= offset, one per facet (within the affine hull)."""
        p0, rows, pivots = self._frame
        k = len(rows)
        coords = [_local(v, p0, pivots) for v in self.vertices]
        out = []
        for h in _facets_local(coords, k):
            h0, hv = h[0], h[1:]
            normal = [Fraction(0)] * self.dim
            for j, c in zip(pivots, hv):
                normal[j] = c
            offset = -h0 + sum((c * p0[j] for j, c in zip(pivots, hv)), Fraction(0))
            prim = la.primitive(normal)
            nz = next(i for i, x in enumerate(normal) if x != 0)
            s = Fraction(prim[nz]) / normal[nz]
            out.append((la.vec(prim), offset * s))
        return tuple(sorted(out))

    def contains(self, x) -> bool:
        x = la.vec(x)
        return (all(la.dot(n, x) == v for n, v in self.equations)
                and all(la.dot(n, x) >= o for n, o in self.facets))

    def interior_contains(self, x) -> bool:
        """Strictly inside (relative to the ambient space; false for lower-dimensional polytopes)."""
        x = la.vec(x)
        return self.is_full_dim and all(la.dot(n, x) > o for n, o in self.facets)

    def contains_polytope(self, other: "Polytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def same_set(self, other: "Polytope") -> bool:
        return self.vertices == other.vertices

    def dilate(self, lam) -> "Polytope":
        lam = Fraction(lam)
        return hull([la.scale(lam, v) for v in self.vertices])

    def translate(self, t) -> "Polytope":
        return hull([la.add(v, la.vec(t)) for v in self.vertices])

    def __add__(self, other: "Polytope") -> "Polytope":
        return minkowski_sum(self, other)

    def lattice_points(self) -> list[tuple]:
        """Integer points of the polytope, sorted."""
        d = self.dim
        lo = [ceil(min(v[i] for v in self.vertices)) for i in range(d)]
        hi = [floor(max(v[i] for v in self.vertices)) for i in range(d)]
        # scan the first d-1 coordinates; solve for the last one exactly
        rows = [(tuple(int(x) for x in n), Fraction(o), False) for n, o in self.facets]
        rows += [(tuple(int(x) for x in n), Fraction(v), True) for n, v in self.equations]
        pts = []
        for head in product(*(range(a, b + 1) for a, b in zip(lo[:-1], hi[:-1]))):
            ylo, yhi = lo[-1], hi[-1]
            for n, o, exact in rows:
                rhs = o - sum(a * b for a, b in zip(n, head))
                c = n[-1]
                if c == 0:
                    if rhs > 0 or (exact and rhs != 0):
                        ylo, yhi = 1, 0
                        break
                    continue
                q = rhs / c
                if exact:
                    if q.denominator != 1:
                        ylo, yhi = 1, 0
                        break
                    ylo, yhi = max(ylo, int(q)), min(yhi, int(q))
                elif c > 0:
                    ylo = max(ylo, ceil(q))
                else:
                    yhi = min(yhi, floor(q))
            pts.extend(head + (y,) for y in range(ylo, yhi + 1))
        return pts

    def triangulate(self) -> list[tuple]:
        """Pulling triangulation into simplices of the polytope's affine dimension."""
        return [tuple(self.vertices[i] for i in s) for s in _pull(list(self.vertices), tuple(range(len(self.vertices))))]


def _pull(points, idx):
    sub = [points[i] for i in idx]
    p0, rows, pivots = _affine_frame(sub)
    k = len(rows)
    if k == 0:
        return [(idx[0],)]
    coords = [_local(p, p0, pivots) for p in sub]
    apex = 0
    out = []
    for h in _facets_local(coords, k):
        on = tuple(idx[i] for i, y in enumerate(coords) if h[0] + la.dot(h[1:], y) == 0)
        if idx[apex] in on:
            continue
        for s in _pull(points, on):
            out.append((idx[apex],) + s)
    return out


def hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull with an irredundant, sorted vertex list."""
    pts = sorted({la.vec(p) for p in points})
    if not pts:
        raise GeometryError("hull of an empty point set")
    if len({len(p) for p in pts}) != 1:
        raise GeometryError("points of mixed dimension")
    p0, rows, pivots = _affine_frame(pts)
    k = len(rows)
    if k == 0:
        return Polytope((pts[0],))
    coords = [_local(p, p0, pivots) for p in pts]
    facets = _facets_local(coords, k)
    verts = []
    for p, y in zip(pts, coords):
        tight = [h[1:] for h in facets if h[0] + la.dot(h[1:], y) == 0]
        if tight and la.rank(tight) == k:
            verts.append(p)
    return Polytope(tuple(verts))


def minkowski_sum(a: Polytope, b: Polytope) -> Polytope:
    return hull(la.add(u, v) for u in a.vertices for v in b.vertices)


def simplex_volume(simplex, basis=None) -> Fraction:
    """Lattice-normalised volume of a simplex; edges expressed in ``basis`` coordinates."""
    k = len(simplex) - 1
    if k == 0:
        return Fraction(1)
    v0 = la.vec(simplex[0])
    edges = [la.sub(la.vec(v), v0) for v in simplex[1:]]
    if basis is not None:
        bt = la.transpose(basis)
        edges = [la.solve(bt, e) for e in edges]
    return abs(la.det(edges)) / factorial(k)


def _direction_lattice(p: Polytope):
    """Basis of Z^n intersected with the direction space of the affine hull."""
    if p.is_full_dim:
        return None
    normals = [n for n, _ in p.equations]
    return [la.vec(r) for r in la.integer_kernel(normals, p.dim)]


def polytope_volume(p: Polytope, lattice: LinMap | None = None) -> Fraction:
    """Exact volume in the affine span, normalised so the lattice has covolume 1.

    ``lattice`` maps lattice coordinates to ambient coordinates (its columns
    form a basis); the default is the standard integer lattice.  A point has
    volume 1 (counting measure in dimension zero).
    """
    if lattice is not None:
        inv = la.inverse(lattice.matrix)
        p = hull(la.matvec(inv, v) for v in p.vertices)
    basis = _direction_lattice(p)
    return sum((simplex_volume(s, basis) for s in p.triangulate()), Fraction(0))


def full_volume(p: Polytope) -> Fraction:
    """Volume in the ambient dimension: zero unless the polytope is full-dimensional."""
    return polytope_volume(p) if p.is_full_dim else Fraction(0)


def polytope_from_inequalities(normals: Sequence[Sequence], offsets: Sequence, dim: int) -> Polytope | None:
    """V-representation of {x : n.x >= o}; None when empty.

    Raises ``GeometryError`` when the set is unbounded.
    """
    rows = [(-Fraction(o),) + la.vec(n) for n, o in zip(normals, offsets)]
    rows.append((Fraction(1),) + tuple(Fraction(0) for _ in range(dim)))
    lin, rays = double_description(rows, dim + 1)
    pts = [tuple(x / r[0] for x in r[1:]) for r in rays if r[0] > 0]
    if not pts:
        return None
    if lin or any(r[0] == 0 for r in rays):
        raise GeometryError("unbounded polyhedron")
    return hull(pts)
