"""Exact linear feasibility over the rationals.

Phase-one simplex with Bland's rule on an integer tableau. Rows are scaled to
integers up front and pivots use fraction-free (integer-preserving) updates,
so every entry stays an exact integer over the common denominator ``det``
without any gcd work per operation. No tolerances anywhere.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    row = [v if isinstance(v, (int, Fraction)) else Fraction(v) for v in row]
    scale = lcm(*(v.denominator for v in row))
    return [v.numerator * (scale // v.denominator) for v in row]


def nonnegative_solution(
    a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> list[Fraction] | None:
    """Find x >= 0 with a @ x == b, or return None if none exists."""
    m = len(a)
    n = len(a[0]) if m else 0
    if len(b) != m:
        raise ValueError("row count of a and length of b differ")
    width = n + m
    rows: list[list[int]] = []
    for i in range(m):
        if len(a[i]) != n:
            raise ValueError("ragged constraint matrix")
        row = _integer_row(list(a[i]) + [b[i]])
        if row[-1] < 0:
            row = [-v for v in row]
        # columns: n structural, m artificial, rhs
        rows.append(row[:n] + [int(k == i) for k in range(m)] + [row[n]])
    basis = [n + i for i in range(m)]
    # actual tableau entries are the stored integers divided by det
    det = 1
    # objective row: minimise the sum of artificials, expressed in reduced form
    cost = [0] * (width + 1)
    for row in rows:
        for j in range(n):
            cost[j] -= row[j]
        cost[width] -= row[width]

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        leave = None
        for i, row in enumerate(rows):
            if row[entering] > 0:
                if leave is None:
                    leave = i
                    continue
                # ratio row[rhs]/row[entering] vs the incumbent's, by cross-multiplication
                lhs = row[width] * rows[leave][entering]
                rhs = rows[leave][width] * row[entering]
                if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            raise ArithmeticError("unbounded phase-one problem")
        det = _pivot(rows, cost, leave, entering, det)
        basis[leave] = entering

    if cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = Fraction(rows[i][width], rows[i][j])
    return x


def _pivot(rows: list[list[int]], cost: list[int], r: int, c: int, det: int) -> int:
    pivot_row = rows[r]
    p = pivot_row[c]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in range(len(row)):
                row[j] = (row[j] * p - f * pivot_row[j]) // det
        else:
            for j in range(len(row)):
                row[j] = (row[j] * p) // det
    f = cost[c]
    for j in range(len(cost)):
        cost[j] = (cost[j] * p - f * pivot_row[j]) // det
    return p
