"""Finitely generated semigroups in Z^d and graded semigroups of value sets.

Bounded membership is three-valued: a search that exhausts its coefficient
bound without being able to rule the point out returns ``UNKNOWN`` rather
than ``False``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from typing import Iterable, Mapping, Sequence

from . import linalg as la
from .exactgeom import ConeGen, GeometryError, Polytope, hull


class _Unknown:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        raise TypeError("UNKNOWN membership has no truth value; compare with `is UNKNOWN`")

    def __repr__(self):
        return "UNKNOWN"


UNKNOWN = _Unknown()


@dataclass(frozen=True)
class SemigroupGens:
    F: tuple

    def __post_init__(self):
        gens = [tuple(int(x) for x in g) for g in self.F]
        if not gens:
            raise ValueError("a semigroup needs at least one generator")
        if len({len(g) for g in gens}) != 1:
            raise ValueError("generators of mixed dimension")
        object.__setattr__(self, "F", tuple(sorted(set(gens))))

    @classmethod
    def of(cls, gens: Iterable[Sequence[int]]) -> "SemigroupGens":
        return cls(tuple(tuple(g) for g in gens))

    @property
    def d(self) -> int:
        return len(self.F[0])

    @property
    def nonzero(self) -> list[tuple]:
        return [g for g in self.F if any(g)]

    def to_json(self) -> dict:
        return {"d": self.d, "gens": [list(g) for g in self.F]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "SemigroupGens":
        gens = cls.of(doc["gens"])
        if gens.d != doc["d"]:
            raise ValueError("declared dimension disagrees with generators")
        return gens


def group_closure(F: SemigroupGens) -> list[tuple]:
    """Hermite normal form basis of the group generated by F."""
    return la.hnf(F.F)


def cone_closure(F: SemigroupGens) -> ConeGen:
    return ConeGen(F.nonzero, F.d).minimal() if F.nonzero else ConeGen((), F.d)


def _positive_functional(F: SemigroupGens):
    """Integer functional strictly positive on every nonzero generator, or None if the cone has a line."""
    cone = ConeGen(F.nonzero, F.d)
    if not cone.generators:
        return tuple(0 for _ in range(F.d))
    if not cone.is_pointed:
        return None
    ell = cone.dual().relative_interior_point()
    ell = la.primitive(ell)
    assert all(la.dot(ell, g) > 0 for g in cone.generators)
    return ell


def membership(F: SemigroupGens, a: Sequence[int], bound: int):
    """Whether a = sum c_i f_i with integers 0 <= c_i <= bound.

    Returns True, False, or ``UNKNOWN`` when the bound is too small to decide.
    """
    if any(Fraction(x).denominator != 1 for x in a):
        raise ValueError("membership is defined for integral points only")
    a = tuple(int(x) for x in a)
    if len(a) != F.d:
        raise ValueError("dimension mismatch")
    if not any(a):
        return True
    if not _in_hnf_lattice(group_closure(F), a) or not cone_closure(F).contains(a):
        return False
    gens = F.nonzero
    ell = _positive_functional(F)
    if ell is None and not semigroup_oracle(F)(a):
        return False
    memo: dict = {}

    def search(i, rem):
        if not any(rem):
            return True
        if i == len(gens):
            return False
        key = (i, rem)
        if key in memo:
            return memo[key]
        g = gens[i]
        cap = bound
        if ell is not None:
            cap = min(cap, la.dot(ell, rem) // la.dot(ell, g))
        ok = False
        r = rem
        for c in range(cap + 1):
            if search(i + 1, r):
                ok = True
                break
            r = tuple(x - y for x, y in zip(r, g))
        memo[key] = ok
        return ok

    if search(0, a):
        return True
    if ell is not None:
        needed = max(la.dot(ell, a) // la.dot(ell, g) for g in gens)
        if bound >= needed:
            return False
    return UNKNOWN


def _idot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def semigroup_oracle(F: SemigroupGens):
    """Exact membership test for S, valid for any cone, with a memo shared across calls.

    Generators g with ell(g) = 0, for ell in the relative interior of the dual
    cone, span the lineality space and generate a group inside S, so
    S = Z<L> + N<rest>; ell then bounds the coefficients on the rest.
    """
    gens = F.nonzero
    zero = tuple(0 for _ in range(F.d))
    if not gens:
        return lambda a: not any(a)
    cone = ConeGen(gens, F.d)
    ell = cone.dual().relative_interior_point()
    ell = tuple(int(c) for c in (la.primitive(ell) if any(ell) else ell))
    line = [g for g in gens if _idot(ell, g) == 0]
    rest = [(g, _idot(ell, g)) for g in gens if _idot(ell, g) > 0]
    line_basis = la.hnf(line) if line else []
    group = group_closure(F)
    closed = cone_closure(F)
    memo: dict = {}

    def search(i, rem):
        if i == len(rest):
            return _in_hnf_lattice(line_basis, rem) if line_basis else rem == zero
        key = (i, rem)
        if key not in memo:
            g, lg = rest[i]
            r, ok = rem, False
            for _ in range(_idot(ell, rem) // lg + 1):
                if search(i + 1, r):
                    ok = True
                    break
                r = tuple(x - y for x, y in zip(r, g))
            memo[key] = ok
        return memo[key]

    def decide(a) -> bool:
        a = tuple(int(x) for x in a)
        if not _in_hnf_lattice(group, a) or not closed.contains(a):
            return False
        return search(0, a)

    return decide


def in_semigroup(F: SemigroupGens, a: Sequence[int]) -> bool:
    """Whether a lies in the semigroup generated by F (no coefficient bound)."""
    if any(Fraction(x).denominator != 1 for x in a) or len(a) != F.d:
        raise ValueError("expected an integral point of the right dimension")
    return semigroup_oracle(F)(a)


def _in_hnf_lattice(basis, p) -> bool:
    """Integer back-substitution against an echelon (HNF) basis."""
    r = list(p)
    for row in basis:
        c = next(i for i, x in enumerate(row) if x)
        q, rem = divmod(r[c], row[c])
        if rem:
            return False
        if q:
            r = [a - q * b for a, b in zip(r, row)]
    return not any(r)


class _Encoding:
    """Points of Z^d as integers in a balanced base, so vector addition is integer addition."""

    def __init__(self, d: int, bound: int):
        self.d, self.base = d, 2 * bound + 3
        self.half = self.base // 2

    def encode(self, p) -> int:
        return sum(int(x) * self.base ** j for j, x in enumerate(p))

    def decode(self, k: int) -> tuple:
        out = []
        for _ in range(self.d):
            k, r = divmod(k + self.half, self.base)
            out.append(r - self.half)
        return tuple(out)


def _enumerate_keys(F: SemigroupGens, level: int):
    ell = _positive_functional(F)
    if ell is None:
        raise GeometryError("semigroup cone contains a line; no exhaustive enumeration")
    ell = tuple(int(c) for c in ell)
    gens = [(g, _idot(ell, g)) for g in F.nonzero]
    # every coordinate of an element with ell <= level is at most level / min ell(g) * max |g_j|
    bound = (level // min(lg for _, lg in gens) + 1) * max(abs(x) for g, _ in gens for x in g) if gens else 0
    enc = _Encoding(F.d, bound)
    steps = [(enc.encode(g), lg) for g, lg in gens]
    seen = {0}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for x, lx in frontier:
            for g, lg in steps:
                if lx + lg <= level:
                    y = x + g
                    if y not in seen:
                        seen.add(y)
                        nxt.append((y, lx + lg))
        frontier = nxt
    return seen, enc


def enumerate_semigroup(F: SemigroupGens, level: int) -> set[tuple]:
    """All elements x of S with ell(x) <= level, for the canonical positive functional ell.

    Requires a pointed cone; every representation climbs in ell, so the list is complete.
    """
    keys, enc = _enumerate_keys(F, level)
    return {enc.decode(k) for k in keys}


def _zonotope_points(F: SemigroupGens, sign: int) -> list[tuple]:
    """Lattice points of A in {sign * sum r_i f_i : 0 <= r_i <= 1}."""
    gens = F.nonzero
    corners = []
    for mask in product((0, 1), repeat=len(gens)):
        corners.append(tuple(sign * sum(m * g[j] for m, g in zip(mask, gens)) for j in range(F.d)))
    Z = hull(corners)
    basis = group_closure(F)
    return [p for p in Z.lattice_points() if _in_hnf_lattice(basis, p)]


@dataclass(frozen=True)
class ShiftCertificate:
    s: tuple
    window: int
    checked: int
    failures: tuple
    undecided: int

    @property
    def valid(self) -> bool:
        return not self.failures and self.undecided == 0


def default_window(F: SemigroupGens, s) -> int:
    return 10 * max([abs(x) for g in F.F for x in g] + [abs(x) for x in s] + [1])


def _window_points(F: SemigroupGens, s, W: int) -> list[tuple]:
    """Points of A ∩ (s + C) in [-W, W]^d, filtered with integer numpy arrays."""
    axes = np.meshgrid(*[np.arange(-W, W + 1, dtype=np.int64)] * F.d, indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=1)
    keep = np.ones(len(pts), dtype=bool)
    shifted = pts - np.array(s, dtype=np.int64)
    for h in cone_closure(F).inequalities:
        keep &= shifted @ np.array([int(x) for x in h], dtype=np.int64) >= 0
    rem = pts.copy()
    for row in group_closure(F):
        row = np.array([int(x) for x in row], dtype=np.int64)
        c = int(np.flatnonzero(row)[0])
        q, r = np.divmod(rem[:, c], row[c])
        keep &= r == 0
        rem -= q[:, None] * row
    keep &= ~rem.any(axis=1)
    return [tuple(int(x) for x in p) for p in pts[keep]]


def verify_khovanskii(F: SemigroupGens, s, window: int | None = None) -> ShiftCertificate:
    """Brute-force check that every point of A ∩ (s + C) in the box [-W, W]^d lies in S."""
    s = tuple(int(x) for x in s)
    W = default_window(F, s) if window is None else window
    ell = _positive_functional(F)
    if ell is None:
        inside = semigroup_oracle(F)
    else:
        keys, enc = _enumerate_keys(F, sum(abs(int(c)) for c in ell) * W)
        inside = lambda p: enc.encode(p) in keys
    pts = _window_points(F, s, W)
    failures = tuple(p for p in pts if not inside(p))
    return ShiftCertificate(s, W, len(pts), failures, 0)


def khovanskii_shift(F: SemigroupGens, verify: bool = True) -> tuple:
    """A shift s in S such that every group point of the translated cone s + C is in S.

    First a shift is built from integer coordinates of the finite set
    A ∩ Y, Y = {sum r_i f_i : -1 <= r_i <= 0}, so that (A ∩ Y) + s ⊆ S.
    It is then lowered to the least element t of S (ordered by a positive
    functional) with t + (A ∩ Z) ⊆ S, Z = {sum r_i f_i : 0 <= r_i <= 1};
    writing a = sum frac(alpha_i) f_i + sum floor(alpha_i) f_i shows this
    condition is both necessary and sufficient.  The result is
    cross-checked by window enumeration.
    """
    gens = F.nonzero
    zero = tuple(0 for _ in range(F.d))
    if not gens:
        return zero
    need = [0] * len(gens)
    for y in _zonotope_points(F, -1):
        z = la.integer_coordinates(gens, y)
        assert z is not None, "points of A ∩ Y lie in the group"
        for i, zi in enumerate(z):
            need[i] = max(need[i], -zi)
    s = tuple(sum(n * g[j] for n, g in zip(need, gens)) for j in range(F.d))

    ell = _positive_functional(F)
    if ell is not None:
        ell = tuple(int(c) for c in ell)
        cell = _zonotope_points(F, 1)
        ls = _idot(ell, s)
        members = enumerate_semigroup(F, max(_idot(ell, y) for y in cell) + ls)
        keyed = ((_idot(ell, x), x) for x in members)
        candidates = sorted(kx for kx in keyed if kx[0] <= ls)
        for _, t in candidates:
            if all(tuple(a + b for a, b in zip(y, t)) in members for y in cell):
                s = t
                break
    if verify:
        cert = verify_khovanskii(F, s)
        if cert.failures:
            raise AssertionError(f"Khovanskii shift {s} fails at {cert.failures[:3]}")
    return s


# -- graded semigroups ------------------------------------------------------

@dataclass(frozen=True)
class GradedSemigroup:
    """Levels S_1..S_{m_max} of a graded semigroup in Z^d, stored explicitly."""

    d: int
    levels: Mapping[int, frozenset]

    def __post_init__(self):
        lv = {int(m): frozenset(tuple(int(x) for x in v) for v in vs) for m, vs in self.levels.items()}
        for vs in lv.values():
            if any(len(v) != self.d for v in vs):
                raise ValueError("level element of wrong dimension")
        object.__setattr__(self, "levels", dict(sorted(lv.items())))
        bad = self.superadditivity_violation()
        if bad is not None:
            raise ValueError(f"S_k + S_l not contained in S_(k+l) at {bad}")

    @property
    def m_max(self) -> int:
        return max(self.levels) if self.levels else 0

    def superadditivity_violation(self):
        for k, sk in self.levels.items():
            for l, sl in self.levels.items():
                if l < k or k + l not in self.levels:
                    continue
                target = self.levels[k + l]
                for a in sk:
                    for b in sl:
                        c = tuple(x + y for x, y in zip(a, b))
                        if c not in target:
                            return (k, l, a, b)
        return None

    @classmethod
    def from_generators(cls, gens: Iterable[tuple[int, Sequence[int]]], m_max: int) -> "GradedSemigroup":
        """Semigroup generated by graded elements (level, value), truncated at m_max."""
        gens = [(int(l), tuple(int(x) for x in v)) for l, v in gens]
        if not gens:
            raise ValueError("no generators")
        d = len(gens[0][1])
        zero = tuple(0 for _ in range(d))
        table = {0: {zero}}
        for m in range(1, m_max + 1):
            cur = set()
            for l, v in gens:
                if 1 <= l <= m:
                    for x in table[m - l]:
                        cur.add(tuple(a + b for a, b in zip(x, v)))
            table[m] = cur
        return cls(d, {m: frozenset(table[m]) for m in range(1, m_max + 1)})

    @classmethod
    def from_level_one(cls, S1: Iterable[Sequence[int]], m_max: int) -> "GradedSemigroup":
        return cls.from_generators([(1, v) for v in S1], m_max)

    def okounkov_hull(self) -> Polytope:
        pts = [tuple(Fraction(x, m) for x in v) for m, vs in self.levels.items() for v in vs]
        if not pts:
            raise GeometryError("all levels are empty")
        return hull(pts)

    def to_json(self) -> dict:
        return {"d": self.d, "levels": {str(m): sorted(list(v) for v in vs) for m, vs in self.levels.items()}}

    @classmethod
    def from_json(cls, doc: Mapping) -> "GradedSemigroup":
        return cls(doc["d"], {int(m): frozenset(tuple(v) for v in vs) for m, vs in doc["levels"].items()})


class SaturationPrecondition(GeometryError):
    pass


@dataclass(frozen=True)
class SaturationResult:
    m0: int | None
    per_level: tuple  # (m, equal?) for m = 1..m_max
    failures: tuple  # (m, lattice point of mK missing from S_m)

    @property
    def found(self) -> bool:
        return self.m0 is not None


def level_agrees(S: GradedSemigroup, K: Polytope, m: int) -> tuple[bool, list]:
    """Whether every lattice point of mK is in S_m, with the ones that are missing."""
    lattice = set(K.dilate(m).lattice_points())
    in_s = {v for v in S.levels.get(m, ()) if K.contains(tuple(Fraction(x, m) for x in v))}
    missing = sorted(lattice - in_s)
    return lattice == in_s, missing


def saturation_level(S: GradedSemigroup, K: Polytope, m_max: int | None = None) -> SaturationResult:
    """Least m0 such that for every m in [m0, m_max] each lattice point of mK lies in S_m."""
    m_max = S.m_max if m_max is None else m_max
    if m_max > S.m_max:
        raise ValueError(f"levels only stored up to {S.m_max}")
    C1 = S.okounkov_hull()
    if K.dim != S.d:
        raise ValueError("dimension mismatch")
    bad = next((v for v in K.vertices if not C1.interior_contains(v)), None)
    if bad is not None:
        raise SaturationPrecondition(f"K is not inside the interior of the hull (vertex {bad})")
    per, fails = [], []
    for m in range(1, m_max + 1):
        ok, missing = level_agrees(S, K, m)
        per.append((m, ok))
        fails.extend((m, p) for p in missing)
    m0 = None
    for m in range(m_max, 0, -1):
        if not per[m - 1][1]:
            break
        m0 = m
    return SaturationResult(m0, tuple(per), tuple(fails))
