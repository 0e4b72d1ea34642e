"""Exact two-phase simplex over the rationals (Bland's rule, so it terminates).

Small and dense on purpose: the programs solved in this package have a few
dozen variables at most.  There is no tolerance parameter anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple | None = None
    value: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(t, r, c):
    inv = 1 / t[r][c]
    t[r] = [x * inv for x in t[r]]
    for i in range(len(t)):
        if i != r and t[i][c] != 0:
            f = t[i][c]
            t[i] = [a - f * b for a, b in zip(t[i], t[r])]


def _simplex(t, basis, ncols, allowed):
    """Minimise the objective stored in the last row of tableau t (reduced costs form)."""
    obj = len(t) - 1
    while True:
        enter = next((j for j in range(ncols) if allowed[j] and t[obj][j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i in range(obj):
            if t[i][enter] > 0:
                ratio = t[i][-1] / t[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(t, r, enter)
        basis[r] = enter


def linprog(
    c: Sequence,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    free: Sequence[int] = (),
    maximize: bool = False,
) -> LPResult:
    """Solve min (or max) c.x subject to A_eq x = b_eq, A_ub x <= b_ub, x_i >= 0 unless i in free."""
    n = len(c)
    free = set(free)
    # column map: each original variable -> list of (column, sign)
    cols = []
    k = 0
    for i in range(n):
        if i in free:
            cols.append([(k, 1), (k + 1, -1)])
            k += 2
        else:
            cols.append([(k, 1)])
            k += 1
    nstd = k
    nslack = len(A_ub)
    nv = nstd + nslack
    rows, rhs = [], []

    def expand(row):
        out = [Fraction(0)] * nv
        for i, a in enumerate(row):
            a = Fraction(a)
            for col, s in cols[i]:
                out[col] += s * a
        return out

    for row, b in zip(A_eq, b_eq):
        rows.append(expand(row))
        rhs.append(Fraction(b))
    for j, (row, b) in enumerate(zip(A_ub, b_ub)):
        r = expand(row)
        r[nstd + j] = Fraction(1)
        rows.append(r)
        rhs.append(Fraction(b))
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    m = len(rows)
    cost = [Fraction(0)] * nv
    sign = -1 if maximize else 1
    for i, ci in enumerate(c):
        for col, s in cols[i]:
            cost[col] += sign * s * Fraction(ci)

    if m == 0:
        if any(x < 0 for x in cost):
            return LPResult("unbounded")
        return LPResult("optimal", tuple(Fraction(0) for _ in range(n)), Fraction(0))

    # phase 1 with artificials
    ntot = nv + m
    t = [rows[i] + [Fraction(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [nv + i for i in range(m)]
    phase1 = [Fraction(0)] * nv + [Fraction(1)] * m + [Fraction(0)]
    for i in range(m):
        phase1 = [a - b for a, b in zip(phase1, t[i])]
    t.append(phase1)
    _simplex(t, basis, ntot, [True] * ntot)
    if t[-1][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= nv:
            j = next((j for j in range(nv) if t[i][j] != 0), None)
            if j is not None:
                _pivot(t, i, j)
                basis[i] = j
    t.pop()
    obj = cost + [Fraction(0)] * m + [Fraction(0)]
    for i in range(m):
        if basis[i] < nv and obj[basis[i]] != 0:
            f = obj[basis[i]]
            obj = [a - f * b for a, b in zip(obj, t[i])]
    t.append(obj)
    allowed = [j < nv for j in range(ntot)]
    status = _simplex(t, basis, ntot, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    xs = [Fraction(0)] * ntot
    for i in range(m):
        xs[basis[i]] = t[i][-1]
    x = tuple(sum((s * xs[col] for col, s in cols[i]), Fraction(0)) for i in range(n))
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", x, value)


def feasible_point(A_eq=(), b_eq=(), A_ub=(), b_ub=(), nvars=None, free=()):
    """A feasible point or None."""
    if nvars is None:
        nvars = len(A_eq[0]) if A_eq else len(A_ub[0])
    res = linprog([0] * nvars, A_eq, b_eq, A_ub, b_ub, free=free)
    return res.x if res.status == "optimal" else None
