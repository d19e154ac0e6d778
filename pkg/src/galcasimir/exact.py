"""Small exact-rational matrix helpers (numpy object arrays of Fractions)."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np


def mat(rows) -> np.ndarray:
    return np.array([[Fraction(x) for x in row] for row in rows], dtype=object)


def identity(m: int) -> np.ndarray:
    out = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            out[i, j] = Fraction(int(i == j))
    return out


def zeros(m: int, k: int | None = None) -> np.ndarray:
    k = m if k is None else k
    out = np.empty((m, k), dtype=object)
    out.fill(Fraction(0))
    return out


def inverse(a: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse over the rationals; ZeroDivisionError if singular."""
    m = a.shape[0]
    if a.shape != (m, m):
        raise ValueError("inverse needs a square matrix")
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(m)]
            for i, row in enumerate(a)]
    for col in range(m):
        piv = next((r for r in range(col, m) if work[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        work[col], work[piv] = work[piv], work[col]
        p = work[col][col]
        work[col] = [x / p for x in work[col]]
        for r in range(m):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return np.array([row[m:] for row in work], dtype=object)


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        q = [Fraction(x) for x in row]
        den = 1
        for x in q:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in q])
    return out


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination.

    Each row is first scaled to integers, which does not change the rank; the
    elimination then stays in the integers with exact divisions.
    """
    a = _integer_rows(rows)
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == nrows:
            break
    return r


def det(a: Sequence[Sequence]) -> Fraction:
    """Exact determinant by Bareiss elimination on a common-denominator copy."""
    q = [[Fraction(x) for x in row] for row in a]
    m = len(q)
    if m == 0:
        return Fraction(1)
    den = 1
    for row in q:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    b = [[int(x * den) for x in row] for row in q]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if b[k][k] == 0:
            piv = next((i for i in range(k + 1, m) if b[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            b[k], b[piv] = b[piv], b[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                b[i][j] = (b[k][k] * b[i][j] - b[i][k] * b[k][j]) // prev
        prev = b[k][k]
    return Fraction(sign * b[m - 1][m - 1], den**m)


def is_zero(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)
