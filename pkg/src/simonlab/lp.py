"""Exact rational feasibility for small linear systems.

``phase_one`` finds x >= 0 with A x = b by the two-phase simplex method's
first phase, using Bland's rule so it cannot cycle.  ``solve_inequalities``
decides G c <= h over free c and returns either a solution or a Farkas
certificate y >= 0 with y^T G = 0 and y^T h < 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def phase_one(A, b):
    """Some x >= 0 with A x = b, or None if there is none."""
    m = len(A)
    nvar = len(A[0]) if m else 0
    rows = []
    for r, (row, rhs) in enumerate(zip(A, b)):
        row = [Fraction(v) for v in row]
        rhs = Fraction(rhs)
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        # one artificial variable per row
        rows.append(row + [Fraction(int(i == r)) for i in range(m)] + [rhs])
    basis = [nvar + i for i in range(m)]
    total = nvar + m
    # reduced costs of "minimise sum of artificials", expressed in the nonbasic vars
    cost = [Fraction(0)] * (total + 1)
    for row in rows:
        for j in range(nvar):
            cost[j] -= row[j]
        cost[total] -= row[total]

    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, row in enumerate(rows):
            if row[enter] > 0:
                ratio = row[total] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen: phase one is bounded below by 0
            raise ArithmeticError("unbounded phase-one problem")
        _pivot(rows, cost, best[1], enter)
        basis[best[1]] = enter

    if cost[total] != 0:
        return None
    x = [Fraction(0)] * nvar
    for i, var in enumerate(basis):
        if var < nvar:
            x[var] = rows[i][total]
    return x


def _pivot(rows, cost, r, c):
    piv = rows[r][c]
    rows[r] = [v / piv for v in rows[r]]
    prow = rows[r]
    for i, row in enumerate(rows):
        if i != r and row[c]:
            f = row[c]
            rows[i] = [a - f * b for a, b in zip(row, prow)]
    if cost[c]:
        f = cost[c]
        cost[:] = [a - f * b for a, b in zip(cost, prow)]


@dataclass
class InequalityResult:
    feasible: bool
    solution: list | None = None
    certificate: list | None = None


def solve_inequalities(G, h) -> InequalityResult:
    """Decide {c free : G c <= h} exactly."""
    m = len(G)
    nv = len(G[0])
    # c = u - v, plus one slack per row
    A = [list(G[i]) + [-g for g in G[i]] + [int(i == j) for j in range(m)] for i in range(m)]
    x = phase_one(A, h)
    if x is not None:
        return InequalityResult(True, solution=[x[j] - x[nv + j] for j in range(nv)])
    # Farkas alternative: y >= 0, G^T y = 0, h^T y = -1
    A = [[G[i][j] for i in range(m)] for j in range(nv)] + [list(h)]
    rhs = [0] * nv + [-1]
    y = phase_one(A, rhs)
    if y is None:
        raise ArithmeticError("neither a solution nor a Farkas certificate was found")
    return InequalityResult(False, certificate=y)


def check_certificate(G, h, y) -> bool:
    """True when y >= 0, y^T G = 0 and y^T h < 0 hold exactly."""
    if any(v < 0 for v in y):
        return False
    nv = len(G[0])
    combo = [sum(Fraction(y[i]) * G[i][j] for i in range(len(G))) for j in range(nv)]
    return all(v == 0 for v in combo) and sum(Fraction(a) * b for a, b in zip(y, h)) < 0
