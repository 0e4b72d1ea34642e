"""Exact rational and integer linear algebra on plain nested sequences.

Matrices are lists of rows; every entry is converted to ``Fraction`` (or
``int`` for the integer routines).  Nothing here ever rounds.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vec = tuple  # tuple of Fraction


def vec(xs: Iterable) -> tuple:
    """Coerce an iterable of numbers (ints, Fractions, strings like '1/2') to a Fraction tuple."""
    return tuple(Fraction(x) for x in xs)


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def scale(c, u):
    c = Fraction(c)
    return tuple(c * a for a in u)


def is_zero(u) -> bool:
    return all(a == 0 for a in u)


def matvec(m, v):
    return tuple(dot(row, v) for row in m)


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def primitive(v) -> tuple:
    """Scale a rational vector to the primitive integer vector on the same ray."""
    v = vec(v)
    if is_zero(v):
        return tuple(0 for _ in v)
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def rref(m, ncols: int | None = None):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    rows = [list(vec(r)) for r in m]
    if not rows:
        return [], []
    ncols = len(rows[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m) -> int:
    return len(rref(m)[1]) if m else 0


def nullspace(m, ncols: int | None = None) -> list[tuple]:
    """Basis of {x : m x = 0} as Fraction tuples."""
    if not m:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    ncols = len(m[0]) if ncols is None else ncols
    rows, pivots = rref(m, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def row_space_basis(vectors) -> list[tuple]:
    rows, _ = rref(list(vectors))
    return [tuple(r) for r in rows]


def solve(a, b):
    """One solution of a x = b, or None if inconsistent.  Free variables are set to zero."""
    a = [list(vec(r)) for r in a]
    ncols = len(a[0]) if a else 0
    aug = [r + [Fraction(x)] for r, x in zip(a, b)]
    rows, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(rows, pivots):
        x[p] = row[ncols]
    return tuple(x)


def det(m) -> Fraction:
    a = [list(vec(r)) for r in m]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m):
    n = len(m)
    aug = [list(vec(r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    rows, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in rows]


# -- integer lattices -------------------------------------------------------

def hnf(rows) -> list[tuple]:
    """Row Hermite normal form of the integer row lattice; zero rows dropped.

    Pivots are positive, entries above a pivot are reduced into [0, pivot).
    """
    a = [[int(x) for x in r] for r in rows]
    if not a:
        return []
    ncols = len(a[0])
    out = []
    r = 0
    for c in range(ncols):
        # Euclid down column c among rows r..end
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c] != 0:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c] != 0:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == len(a):
                break
    out = [tuple(row) for row in a[:r] if any(row)]
    return out


def integer_kernel(m, ncols: int) -> list[tuple]:
    """Basis of the lattice {x in Z^ncols : m x = 0} (m rational)."""
    if not m:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    # clear denominators row by row
    rows = [primitive(r) if not is_zero(vec(r)) else tuple(0 for _ in r) for r in m]
    # column operations on m tracked in u: work with the transpose augmented by identity
    aug = [list(col) + [int(i == j) for j in range(ncols)] for i, col in enumerate(zip(*rows))]
    k = len(rows)
    h = hnf(aug) if aug else []
    kern = [tuple(r[k:]) for r in h if all(x == 0 for x in r[:k])]
    # hnf drops nothing with nonzero identity part, so the kernel rows are complete
    return kern


def lattice_contains(basis, v) -> bool:
    """Whether integer vector v lies in the Z-span of the (row) basis."""
    if not basis:
        return all(x == 0 for x in v)
    sol = solve(transpose(basis), v)
    if sol is None:
        return False
    # basis rows are independent (hnf output), so the solution is unique
    return all(x.denominator == 1 for x in sol)


def integer_coordinates(gens, v):
    """Some integer vector z with sum z_i gens_i = v, or None."""
    gens = [tuple(int(x) for x in g) for g in gens]
    n = len(gens)
    d = len(v)
    # hnf of [gens | I] gives unimodular transformation
    aug = [list(g) + [int(i == j) for j in range(n)] for i, g in enumerate(gens)]
    h = hnf(aug)
    basis = [r[:d] for r in h if any(r[:d])]
    trans = [r[d:] for r in h if any(r[:d])]
    if not basis:
        return tuple([0] * n) if all(x == 0 for x in v) else None
    sol = solve(transpose(basis), v)
    if sol is None or any(x.denominator != 1 for x in sol):
        return None
    z = [0] * n
    for c, t in zip(sol, trans):
        for j in range(n):
            z[j] += int(c) * t[j]
    return tuple(z)
