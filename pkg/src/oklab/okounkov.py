"""Okounkov bodies of graded monomial series under a lexicographic valuation.

For a torus-invariant divisor the sections of O(mD) are the characters chi^u,
u a lattice point of m P_D, so every level is already a set of exponent
vectors and the valuation of a section is the lex-least exponent in the
chosen variable order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from . import radicals
from .exactgeom import GeometryError, Polytope, full_volume, hull, polytope_volume
from .semigroups import GradedSemigroup, SaturationResult, saturation_level
from .toric import ToricDivisor, section_polytope, volume_sections


@dataclass(frozen=True)
class LexValuation:
    """v(f) = lex-least exponent of f after permuting coordinates by ``order``."""

    d: int
    order: tuple = ()

    def __post_init__(self):
        order = tuple(self.order) if self.order else tuple(range(self.d))
        if sorted(order) != list(range(self.d)):
            raise ValueError(f"{order} is not a permutation of 0..{self.d - 1}")
        object.__setattr__(self, "order", order)

    def of_monomial(self, u: Sequence) -> tuple:
        return tuple(u[i] for i in self.order)

    def __call__(self, poly: Mapping[tuple, object]) -> tuple:
        """Valuation of a polynomial given as {exponent: coefficient}."""
        support = [self.of_monomial(u) for u, c in poly.items() if c != 0]
        if not support:
            raise ValueError("valuation of the zero polynomial")
        return min(support)


def value_set(sections: Iterable[Sequence], val: LexValuation) -> frozenset:
    """Values of a monomial basis: the exponents, permuted."""
    return frozenset(val.of_monomial(tuple(u)) for u in sections)


@dataclass(frozen=True)
class GradedValueSets:
    """V_0 = {0}, V_1, ..., V_{m_max}: per-level value sets in Z^d."""

    d: int
    levels: Mapping[int, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        lv = {int(m): frozenset(tuple(int(x) for x in v) for v in vs) for m, vs in self.levels.items()}
        lv[0] = frozenset({tuple(0 for _ in range(self.d))})
        object.__setattr__(self, "levels", dict(sorted(lv.items())))
        bad = self.superadditivity_violation()
        if bad is not None:
            raise ValueError(f"V_k + V_l not inside V_(k+l) at {bad}")

    @property
    def m_max(self) -> int:
        return max(self.levels)

    def superadditivity_violation(self):
        for k, vk in self.levels.items():
            for l, vl in self.levels.items():
                if l < k or k + l not in self.levels or k == 0:
                    continue
                target = self.levels[k + l]
                for a in vk:
                    for b in vl:
                        if tuple(x + y for x, y in zip(a, b)) not in target:
                            return (k, l, a, b)
        return None

    @classmethod
    def from_divisor(cls, D: ToricDivisor, m_max: int, val: LexValuation | None = None) -> "GradedValueSets":
        d = D.fan.dim
        val = val or LexValuation(d)
        P = section_polytope(D)
        levels = {m: value_set(P.dilate(m).lattice_points(), val) for m in range(1, m_max + 1)}
        return cls(d, levels)

    def as_semigroup(self) -> GradedSemigroup:
        return GradedSemigroup(self.d, {m: v for m, v in self.levels.items() if m >= 1})

    def to_json(self) -> dict:
        return {"d": self.d, "levels": {str(m): sorted(list(v) for v in vs) for m, vs in self.levels.items()}}


def okounkov_body(V: GradedValueSets) -> Polytope:
    """Hull of the union of V_m / m over the stored positive levels."""
    pts = [tuple(Fraction(x, m) for x in v) for m, vs in V.levels.items() if m >= 1 for v in vs]
    if not pts:
        raise GeometryError("all levels are empty")
    return hull(pts)


@dataclass(frozen=True)
class MeasureReport:
    rows: tuple  # (m, |V_m| / m^k, |that - body volume|), k the body's dimension
    body_volume: Fraction
    converged: bool | None  # None when no tolerance was given

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"rows": to_jsonable(self.rows), "body_volume": to_jsonable(self.body_volume),
                "converged": self.converged}


def measure_report(V: GradedValueSets, tolerance=None) -> MeasureReport:
    """Total mass of the level measures against the Lebesgue volume of the body."""
    body = okounkov_body(V)
    # normalise by the body's own dimension so degenerate series give a flat report
    k = body.affine_dim
    target = polytope_volume(body)
    rows = []
    for m, vs in V.levels.items():
        if m == 0:
            continue
        mass = Fraction(len(vs), m ** k)
        rows.append((m, mass, abs(mass - target)))
    ok = None if tolerance is None else (bool(rows) and rows[-1][2] <= Fraction(tolerance))
    return MeasureReport(tuple(rows), target, ok)


@dataclass(frozen=True)
class LogConcavityReport:
    vols: tuple  # vol(D1), vol(D2), vol(D1 + D2)
    minkowski_inclusion: bool
    root_inequality: bool

    @property
    def holds(self) -> bool:
        return self.minkowski_inclusion and self.root_inequality

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"vols": to_jsonable(self.vols), "minkowski_inclusion": self.minkowski_inclusion,
                "root_inequality": self.root_inequality, "holds": self.holds}


def logconcavity_check(D1: ToricDivisor, D2: ToricDivisor, m_max: int = 1) -> LogConcavityReport:
    """Ok(D1) + Ok(D2) inside Ok(D1 + D2), and vol^(1/d) superadditive, both exactly."""
    d = D1.fan.dim
    vols = [volume_sections(D, 1)[1] for D in (D1, D2, D1 + D2)]
    if vols[0] <= 0 or vols[1] <= 0:
        raise GeometryError("both divisors must be big")
    bodies = [okounkov_body(GradedValueSets.from_divisor(D, m_max)) for D in (D1, D2, D1 + D2)]
    inclusion = bodies[2].contains_polytope(bodies[0] + bodies[1])
    root = radicals.brunn_minkowski_holds(vols[2], vols[0], vols[1], d)
    return LogConcavityReport(tuple(vols), inclusion, root)


@dataclass(frozen=True)
class InnerApproximation:
    generators: tuple  # (level, value)
    certificate: SaturationResult

    def to_json(self) -> dict:
        return {"generators": [[m, list(v)] for m, v in self.generators],
                "m0": self.certificate.m0}


def inner_approx(V: GradedValueSets, K: Polytope, m_max: int | None = None) -> InnerApproximation:
    """Finitely many graded generators whose semigroup already saturates K.

    Generators are taken from levels 1..k for increasing k until K sits in the
    interior of the generated body and the saturation scan finds an m0.
    """
    m_max = V.m_max if m_max is None else m_max
    body = okounkov_body(V)
    bad = next((v for v in K.vertices if not body.interior_contains(v)), None)
    if bad is not None:
        raise GeometryError(f"K is not inside the interior of the body (vertex {bad})")
    for k in range(1, m_max + 1):
        gens = tuple(sorted((m, v) for m in range(1, k + 1) for v in V.levels[m]))
        S = GradedSemigroup.from_generators(gens, m_max)
        if not all(S.okounkov_hull().interior_contains(v) for v in K.vertices):
            continue
        cert = saturation_level(S, K, m_max)
        if cert.found:
            return InnerApproximation(gens, cert)
    raise GeometryError(f"no generator set from levels <= {m_max} certifies K")


def shrink_toward_centroid(P: Polytope, factor) -> Polytope:
    """Image of P under x -> c + factor (x - c), c the vertex average."""
    factor = Fraction(factor)
    n = len(P.vertices)
    c = tuple(sum(v[i] for v in P.vertices) / n for i in range(P.dim))
    return hull(tuple(ci + factor * (vi - ci) for vi, ci in zip(v, c)) for v in P.vertices)


def normalized_volume(V: GradedValueSets) -> Fraction:
    """d! times the Lebesgue volume of the body."""
    return factorial(V.d) * full_volume(okounkov_body(V))
