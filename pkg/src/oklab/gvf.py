"""Valuations on k(t) for k = Q or F_p: places, divisors, heights and the product formula.

A place is a monic irreducible polynomial (weight = its degree) or the
degree valuation at infinity (weight 1).  A measure assigns a mass to each
place; the canonical measure gives every place mass equal to its weight,
which makes sum mass(v) v(f) vanish for every nonzero f.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy
from scipy.optimize import linprog as sp_linprog

from . import linalg as la
from .exactgeom import double_description

T = sympy.Symbol("t")


# -- base field and rational functions ---------------------------------------------------

@dataclass(frozen=True)
class BaseField:
    """Q when p == 0, otherwise F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p and (self.p > 97 or not sympy.isprime(self.p)):
            raise ValueError(f"F_{self.p}: p must be a prime <= 97")

    def poly(self, expr) -> sympy.Poly:
        if self.p:
            return sympy.Poly(expr, T, modulus=self.p)
        return sympy.Poly(expr, T, domain="QQ")

    def coeff_key(self, c) -> Fraction:
        if self.p:
            return Fraction(int(c) % self.p)
        return Fraction(str(c))

    @property
    def name(self) -> str:
        return f"F_{self.p}" if self.p else "Q"


QQ = BaseField(0)


@dataclass(frozen=True)
class RatFunc:
    """num / den in k(t), both sympy polynomials over the base field."""

    num: sympy.Poly
    den: sympy.Poly
    field: BaseField = QQ

    @classmethod
    def parse(cls, text: str, field: BaseField = QQ) -> "RatFunc":
        expr = sympy.together(sympy.sympify(text.replace("^", "**"), locals={"t": T}))
        n, d = sympy.fraction(expr)
        return cls(field.poly(n), field.poly(d), field)

    @classmethod
    def of(cls, num, den=1, field: BaseField = QQ) -> "RatFunc":
        return cls(field.poly(num), field.poly(den), field)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den, self.field)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero function")
        return RatFunc(self.num * other.den, self.den * other.num, self.field)

    def __pow__(self, e: int) -> "RatFunc":
        if e >= 0:
            return RatFunc(self.num ** e, self.den ** e, self.field)
        return RatFunc(self.den ** -e, self.num ** -e, self.field)

    def __str__(self) -> str:
        return f"({self.num.as_expr()})/({self.den.as_expr()})"


# -- places -----------------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Place:
    """('inf',) or a monic irreducible polynomial by its coefficient tuple (leading first)."""

    coeffs: tuple = ()  # empty for infinity
    p: int = 0

    @property
    def is_infinite(self) -> bool:
        return not self.coeffs

    @property
    def weight(self) -> int:
        return 1 if self.is_infinite else len(self.coeffs) - 1

    @classmethod
    def infinity(cls, field: BaseField = QQ) -> "Place":
        return cls((), field.p)

    @classmethod
    def of(cls, poly, field: BaseField = QQ) -> "Place":
        """Place of a monic irreducible polynomial (string, sympy expr or Poly)."""
        if isinstance(poly, str):
            poly = sympy.sympify(poly.replace("^", "**"), locals={"t": T})
        P = field.poly(poly)
        if P.degree() < 1 or not P.is_irreducible:
            raise ValueError(f"{P.as_expr()} is not irreducible of positive degree over {field.name}")
        P = P.monic()
        return cls(tuple(field.coeff_key(c) for c in P.all_coeffs()), field.p)

    def valuation(self, f: RatFunc) -> int:
        if f.is_zero:
            raise ValueError("valuation of the zero function")
        if self.is_infinite:
            return f.den.degree() - f.num.degree()
        field = BaseField(self.p)
        P = field.poly(sum(int(c) * T ** k if self.p else sympy.Rational(c.numerator, c.denominator) * T ** k
                           for k, c in enumerate(reversed(self.coeffs))))
        return _order(f.num, P) - _order(f.den, P)

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        terms = []
        deg = len(self.coeffs) - 1
        for k, c in enumerate(self.coeffs):
            e = deg - k
            if c == 0:
                continue
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if mono and c == 1:
                s = mono
            elif mono:
                s = f"{c}*{mono}"
            else:
                s = str(c)
            terms.append(s)
        return "+".join(terms).replace("+-", "-")


def _order(f: sympy.Poly, P: sympy.Poly) -> int:
    k = 0
    while not f.is_zero:
        q, r = f.div(P)
        if not r.is_zero:
            break
        f, k = q, k + 1
    return k


def divisor_of(f: RatFunc) -> dict[Place, int]:
    """Orders of f at every place where it is nonzero; sum of order * weight is 0."""
    if f.is_zero:
        raise ValueError("divisor of the zero function")
    out: dict[Place, int] = {}
    for poly, sign in ((f.num, 1), (f.den, -1)):
        for fac, mult in poly.factor_list()[1]:
            if fac.degree() < 1:
                continue
            pl = Place.of(fac, f.field)
            out[pl] = out.get(pl, 0) + sign * mult
    inf = f.den.degree() - f.num.degree()
    if inf:
        out[Place.infinity(f.field)] = inf
    return {k: v for k, v in sorted(out.items()) if v}


# -- measures ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaceMeasure:
    """Masses on places: canonical weights (optionally overridden) or a finite support."""

    masses: Mapping[Place, Fraction] = field(default_factory=dict)
    canonical: bool = False

    def __post_init__(self):
        m = {k: Fraction(v) for k, v in self.masses.items()}
        if any(v < 0 for v in m.values()):
            raise ValueError("masses must be nonnegative")
        object.__setattr__(self, "masses", dict(sorted(m.items())))

    def mass(self, v: Place) -> Fraction:
        if v in self.masses:
            return self.masses[v]
        return Fraction(v.weight) if self.canonical else Fraction(0)

    def scaled(self, lam) -> "PlaceMeasure":
        lam = Fraction(lam)
        if lam <= 0:
            raise ValueError("scale must be positive")
        if self.canonical:
            raise ValueError("scale a finite measure; the canonical one is fixed")
        return PlaceMeasure({k: lam * v for k, v in self.masses.items()})

    def to_json(self) -> dict:
        places = []
        for pl, m in self.masses.items():
            entry = {"inf": True} if pl.is_infinite else {"poly": str(pl)}
            entry["mass"] = [m.numerator, m.denominator]
            places.append(entry)
        return {"places": places, "canonical": self.canonical}

    @classmethod
    def from_json(cls, doc: Mapping, field: BaseField = QQ) -> "PlaceMeasure":
        from .serialize import unrat
        masses = {}
        for e in doc.get("places", []):
            pl = Place.infinity(field) if e.get("inf") else Place.of(e["poly"], field)
            masses[pl] = unrat(e["mass"])
        return cls(masses, bool(doc.get("canonical", False)))


def canonical_measure(**overrides) -> PlaceMeasure:
    return PlaceMeasure(overrides.get("masses", {}), True)


def uncovered_places(f: RatFunc, mu: PlaceMeasure) -> list[Place]:
    """Places in the support of div(f) that carry no mass."""
    return [v for v in divisor_of(f) if mu.mass(v) == 0]


def product_formula_residual(f: RatFunc, mu: PlaceMeasure) -> Fraction:
    return sum((mu.mass(v) * k for v, k in divisor_of(f).items()), Fraction(0))


def height(f: RatFunc, mu: PlaceMeasure, r=1) -> Fraction:
    """r * sum mass(v) max(v(f), 0)."""
    return Fraction(r) * sum((mu.mass(v) * max(k, 0) for v, k in divisor_of(f).items()), Fraction(0))


def projective_height(fs: Sequence[RatFunc], mu: PlaceMeasure, r=1) -> Fraction:
    """r * sum mass(v) max(0, v(f_1), ..., v(f_n)); zero coordinates are dropped."""
    nz = [f for f in fs if not f.is_zero]
    if not nz:
        raise ValueError("all coordinates are zero")
    divs = [divisor_of(f) for f in nz]
    places = sorted(set().union(*divs))
    return Fraction(r) * sum((mu.mass(v) * max([0] + [d.get(v, 0) for d in divs]) for v in places),
                             Fraction(0))


# -- tropical terms --------------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    i: int


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Min:
    a: object
    b: object


@dataclass(frozen=True)
class Scale:
    q: Fraction
    a: object


@dataclass(frozen=True)
class Zero:
    """The constant 0, the only constant that keeps a term homogeneous."""


def trop_eval(term, xs: Sequence) -> Fraction:
    """Value of the piecewise-linear term at the point xs."""
    if isinstance(term, Var):
        return Fraction(xs[term.i])
    if isinstance(term, Add):
        return trop_eval(term.a, xs) + trop_eval(term.b, xs)
    if isinstance(term, Min):
        return min(trop_eval(term.a, xs), trop_eval(term.b, xs))
    if isinstance(term, Scale):
        return term.q * trop_eval(term.a, xs)
    if isinstance(term, Zero):
        return Fraction(0)
    raise TypeError(f"not a term: {term!r}")


def _const(node) -> Fraction:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Fraction(str(node.value))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_const(node.operand)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        return _const(node.left) / _const(node.right)
    raise ValueError("expected a rational constant")


def parse_term(text: str):
    """Parse terms like 'min(x1, x2) + 1/2*x3 - max(x1, 0*x1)'; variables are x1..xn."""

    def build(node):
        if isinstance(node, ast.Name):
            if node.id[0] == "x" and node.id[1:].isdigit() and int(node.id[1:]) >= 1:
                return Var(int(node.id[1:]) - 1)
            raise ValueError(f"unknown variable {node.id}")
        if isinstance(node, ast.Constant):
            if _const(node) != 0:
                raise ValueError("nonzero constants break homogeneity")
            return Zero()
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return Scale(Fraction(-1), build(node.operand))
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return Add(build(node.left), build(node.right))
            if isinstance(node.op, ast.Sub):
                return Add(build(node.left), Scale(Fraction(-1), build(node.right)))
            if isinstance(node.op, ast.Mult):
                try:
                    return Scale(_const(node.left), build(node.right))
                except ValueError:
                    return Scale(_const(node.right), build(node.left))
            if isinstance(node.op, ast.Div):
                return Scale(1 / _const(node.right), build(node.left))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in ("min", "max"):
            if not node.args or node.keywords:
                raise ValueError(f"{node.func.id} needs positional arguments")
            args = [build(a) for a in node.args]
            if node.func.id == "max":
                args = [Scale(Fraction(-1), a) for a in args]
            out = args[0]
            for a in args[1:]:
                out = Min(out, a)
            return Scale(Fraction(-1), out) if node.func.id == "max" else out
        raise ValueError(f"unsupported syntax in term: {ast.dump(node)}")

    return build(ast.parse(text, mode="eval").body)


def term_arity(term) -> int:
    if isinstance(term, Var):
        return term.i + 1
    if isinstance(term, Zero):
        return 0
    if isinstance(term, (Add, Min)):
        return max(term_arity(term.a), term_arity(term.b))
    return term_arity(term.a)


def eval_term(term, fs: Sequence[RatFunc], mu: PlaceMeasure) -> Fraction:
    """sum over places of mass(v) * term(v(f_1), ..., v(f_n))."""
    if any(f.is_zero for f in fs):
        raise ValueError("term arguments must be nonzero")
    if term_arity(term) > len(fs):
        raise ValueError("term uses more variables than arguments supplied")
    divs = [divisor_of(f) for f in fs]
    places = sorted(set().union(*divs)) if divs else []
    # off the union of supports every value is 0 and so is the homogeneous term
    return sum((mu.mass(v) * trop_eval(term, [d.get(v, 0) for d in divs]) for v in places), Fraction(0))


def min_via_projective_height(fs: Sequence[RatFunc], mu: PlaceMeasure) -> Fraction:
    """sum mass * min_i v(f_i), rebuilt as v(f_1) - max(0, v(f_1 / f_j)).

    Uses only projective heights and the product formula, so it agrees with
    ``eval_term`` for measures that satisfy the product formula.
    """
    f1 = fs[0]
    ratios = [f1 / f for f in fs[1:]]
    return product_formula_residual(f1, mu) - projective_height([RatFunc.of(1, 1, f1.field)] + ratios, mu)


# -- Artin-Whaples ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class WhaplesResult:
    places: tuple
    kernel_dim: int
    rays: tuple
    unique: bool

    @property
    def ray(self):
        return self.rays[0] if self.unique else None

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"places": [str(p) for p in self.places], "kernel_dim": self.kernel_dim,
                "rays": to_jsonable(self.rays), "unique": self.unique}


def artin_whaples_solve(places: Sequence[Place], fns: Sequence[RatFunc]) -> WhaplesResult:
    """Nonnegative masses making every listed function satisfy the product formula."""
    places = tuple(places)
    rows = []
    for f in fns:
        div = divisor_of(f)
        missing = [v for v in div if v not in places]
        if missing:
            raise ValueError(f"divisor of {f} meets places outside the list: {[str(v) for v in missing]}")
        rows.append([div.get(v, 0) for v in places])
    n = len(places)
    kernel = la.nullspace(rows, n) if rows else la.nullspace([], n)
    ineqs = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    for r in rows:
        ineqs.append(tuple(r))
        ineqs.append(tuple(-x for x in r))
    lin, rays = double_description(ineqs, n)
    rays = tuple(sorted(la.primitive(r) for r in rays))
    if not rays:
        raise ValueError("no nonzero nonnegative solution of the product formula")
    unique = len(kernel) == 1 and len(rays) == 1 and all(x > 0 for x in rays[0])
    return WhaplesResult(places, len(kernel), rays, unique)


# -- measures from curve classes on toric surfaces -------------------------------------------------

@dataclass(frozen=True)
class DeltaReport:
    masses: tuple  # mass of each toric prime divisor's valuation
    product_formula: tuple  # residual per monomial basis function
    section_identity: bool

    @property
    def holds(self) -> bool:
        return all(r == 0 for r in self.product_formula) and self.section_identity

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"masses": to_jsonable(self.masses), "product_formula": to_jsonable(self.product_formula),
                "section_identity": self.section_identity, "holds": self.holds}


def delta_measure(S, a) -> DeltaReport:
    """Masses a.[D_rho] on the divisorial valuations of a toric surface's prime divisors."""
    if S.fan is None:
        raise ValueError("delta_measure needs a toric surface")
    a = la.vec(a)
    bad = next((e for e in S.eff_gens if S.dot(a, e) < 0), None)
    if bad is not None:
        raise ValueError(f"a pairs negatively with effective class {bad}")
    masses = tuple(S.dot(a, c) for c in S.ray_classes)
    rays = S.fan.rays
    n = S.fan.dim
    residuals = []
    for i in range(n):
        # chi^{e_i} vanishes to order <e_i, v_rho> along D_rho
        residuals.append(sum((m * r[i] for m, r in zip(masses, rays)), Fraction(0)))
    # pair the measure against each prime divisor with v_rho(D_sigma) = delta
    back = tuple(sum((m * int(i == j) for j, m in enumerate(masses)), Fraction(0)) for i in range(len(rays)))
    identity = back == tuple(S.dot(a, c) for c in S.ray_classes)
    return DeltaReport(masses, tuple(residuals), identity)


# -- Fekete and Chebyshev -------------------------------------------------------------------------------

@dataclass(frozen=True)
class FeketeResult:
    best: object
    n_best: int
    running: tuple  # running maximum of a_n / n

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"best": to_jsonable(self.best), "n_best": self.n_best, "running": to_jsonable(self.running)}


class SuperadditivityError(ValueError):
    def __init__(self, n: int, m: int):
        super().__init__(f"a_{n + m} < a_{n} + a_{m}")
        self.witness = (n, m)


def fekete_limit(a: Callable[[int], object] | Sequence, n_max: int, tol: float = 0.0) -> FeketeResult:
    """max_{n <= n_max} a_n / n after checking a_{n+m} >= a_n + a_m for all n + m <= n_max."""
    vals = [None] + [a(n) if callable(a) else a[n - 1] for n in range(1, n_max + 1)]
    for n in range(1, n_max + 1):
        for m in range(n, n_max + 1 - n):
            if vals[n + m] < vals[n] + vals[m] - tol:
                raise SuperadditivityError(n, m)
    best, n_best, running = None, 0, []
    for n in range(1, n_max + 1):
        q = vals[n] / n if isinstance(vals[n], float) else Fraction(vals[n]) / n
        if best is None or q > best:
            best, n_best = q, n
        running.append(best)
    return FeketeResult(best, n_best, tuple(running))


@dataclass(frozen=True)
class ChebyshevResult:
    estimate: float
    interval: tuple
    grid: int
    n_max: int
    lp_tolerance: float
    log_minimax: tuple
    fekete: FeketeResult

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "interval": list(self.interval), "grid": self.grid,
                "n_max": self.n_max, "lp_tolerance": self.lp_tolerance,
                "log_minimax": list(self.log_minimax), "best_n": self.fekete.n_best}


def _minimax_log(n: int, y: np.ndarray, tol: float) -> float:
    """log of min over monic g of degree n of max |g| on nodes y in [-1, 1]."""
    if n == 0:
        return 0.0
    # g = 2^(1-n) (T_n + sum_{k<n} b_k T_k); minimise s with |T_n + sum b_k T_k| <= s
    V = np.polynomial.chebyshev.chebvander(y, n)
    A = V[:, :n]
    tn = V[:, n]
    ones = np.ones((len(y), 1))
    A_ub = np.vstack([np.hstack([A, -ones]), np.hstack([-A, -ones])])
    b_ub = np.concatenate([-tn, tn])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = sp_linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * n + [(0, None)],
                     method="highs", options={"primal_feasibility_tolerance": tol,
                                              "dual_feasibility_tolerance": tol})
    if res.status != 0:
        raise RuntimeError(f"minimax LP failed at degree {n}: {res.message}")
    return math.log(res.fun) + (1 - n) * math.log(2)


def chebyshev_constant(a: float, b: float, grid: int = 2001, n_max: int = 32, tol: float = 1e-9) -> ChebyshevResult:
    """exp(-lim a_n / n), a_n = -log of the discrete monic minimax of degree n on [a, b].

    The only floating-point routine in the package.
    """
    if not b > a:
        raise ValueError("degenerate interval")
    if grid < 64:
        raise ValueError("grid needs at least 64 points")
    x = np.linspace(a, b, grid)
    y = (2 * x - a - b) / (b - a)
    half = (b - a) / 2
    logs = [_minimax_log(n, y, tol) + n * math.log(half) for n in range(1, n_max + 1)]
    fk = fekete_limit(lambda n: -logs[n - 1], n_max, tol=1e-6)
    return ChebyshevResult(math.exp(-fk.best), (a, b), grid, n_max, tol, tuple(logs), fk)


# -- finite adelic verifier ------------------------------------------------------------------------------

@dataclass(frozen=True)
class AdelicReport:
    violations: tuple  # (index, level, normalised integral)
    checked: int

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        from .serialize import to_jsonable
        return {"violations": to_jsonable(self.violations), "checked": self.checked, "holds": self.holds}


def adelic_consistency_check(masses: Mapping[str, object], sections: Sequence[tuple], alpha=0) -> AdelicReport:
    """(1/m) sum mass(v) v(f) <= alpha for each (m, {valuation name: v(f)})."""
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValueError("slack must be nonnegative")
    masses = {k: Fraction(v) for k, v in masses.items()}
    bad = []
    for i, (m, values) in enumerate(sections):
        if m < 1:
            raise ValueError("levels start at 1")
        unknown = set(values) - set(masses)
        if unknown:
            raise ValueError(f"values given at unsampled valuations {sorted(unknown)}")
        s = sum((masses[k] * Fraction(v) for k, v in values.items()), Fraction(0)) / m
        if s > alpha:
            bad.append((i, m, s))
    return AdelicReport(tuple(bad), len(sections))


def sections_from_functions(mu: PlaceMeasure, items: Sequence[tuple]) -> tuple[dict, list]:
    """Turn (level, f) pairs into the name/value form used by the adelic check."""
    places = sorted(set().union(*(divisor_of(f) for _, f in items))) if items else []
    masses = {str(v): mu.mass(v) for v in places if mu.mass(v) > 0}
    secs = []
    for m, f in items:
        d = divisor_of(f)
        secs.append((m, {str(v): d.get(v, 0) for v in places if str(v) in masses}))
    return masses, secs
