"""Exact sign of sums of rational multiples of n-th roots of nonnegative rationals.

Every comparison of the form x^(1/n) + y^(1/n) <= z^(1/n) reduces to the sign
of sum c_i r_i^(1/n).  Each term is rewritten as q * s^(1/n) with s a positive
n-th-power-free integer; distinct such radicals are linearly independent over
Q, so the sum vanishes exactly when every grouped coefficient does.  A nonzero
sum is then separated from 0 by shrinking rational enclosures of the roots.
"""
from __future__ import annotations

from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from sympy import factorint, integer_nthroot


def _power_free(k: int, n: int) -> tuple[int, int]:
    """Write k = a^n * s with s n-th-power-free; returns (a, s)."""
    a, s = 1, 1
    for p, e in factorint(k).items():
        a *= p ** (e // n)
        s *= p ** (e % n)
    return a, s


def normalize(c, r, n: int) -> tuple[Fraction, int]:
    """c * r^(1/n) as q * s^(1/n) with s a positive n-th-power-free integer."""
    c, r = Fraction(c), Fraction(r)
    if r < 0:
        raise ValueError("radicand must be nonnegative")
    if r == 0 or c == 0:
        return Fraction(0), 1
    # (p/q)^(1/n) = (p * q^(n-1))^(1/n) / q
    a, s = _power_free(r.numerator * r.denominator ** (n - 1), n)
    return c * Fraction(a, r.denominator), s


def collect(terms: Iterable[tuple], n: int) -> dict[int, Fraction]:
    """Group terms (coefficient, radicand) by n-th-power-free radicand."""
    out: dict[int, Fraction] = {}
    for c, r in terms:
        q, s = normalize(c, r, n)
        if q:
            out[s] = out.get(s, Fraction(0)) + q
    return {s: q for s, q in out.items() if q}


def _root_bounds(s: int, n: int, k: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= s^(1/n) <= hi with hi - lo = 2^-k (or exact)."""
    scale = 1 << k
    root, exact = integer_nthroot(s * scale ** n, n)
    lo = Fraction(int(root), scale)
    return (lo, lo) if exact else (lo, lo + Fraction(1, scale))


def sign_of_sum(terms: Sequence[tuple], n: int) -> int:
    """Sign (-1, 0, 1) of sum c_i * r_i^(1/n), decided exactly."""
    if n < 1:
        raise ValueError("root index must be positive")
    grouped = collect(terms, n)
    if not grouped:
        return 0
    k = 8
    while True:
        lo = hi = Fraction(0)
        for s, q in grouped.items():
            a, b = _root_bounds(s, n, k)
            if q > 0:
                lo, hi = lo + q * a, hi + q * b
            else:
                lo, hi = lo + q * b, hi + q * a
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        k *= 2


def root_sum_geq(lhs: Sequence[tuple], rhs: Sequence[tuple], n: int) -> bool:
    """Whether sum of lhs terms >= sum of rhs terms, terms being (coefficient, radicand)."""
    return sign_of_sum(list(lhs) + [(-Fraction(c), r) for c, r in rhs], n) >= 0


def brunn_minkowski_holds(v_sum, v1, v2, n: int) -> bool:
    """v_sum^(1/n) >= v1^(1/n) + v2^(1/n), exactly."""
    return root_sum_geq([(1, v_sum)], [(1, v1), (1, v2)], n)


def geometric_mean_leq(a, values: Sequence, n: int) -> bool:
    """prod(values)^(1/n) <= a for a >= 0, via a^n >= prod(values)."""
    a = Fraction(a)
    return a >= 0 and a ** n >= prod((Fraction(v) for v in values), start=Fraction(1))
