"""Exact linear algebra over the rationals.

Matrices are lists of rows. ``rank`` and ``det`` use fraction-free
(Bareiss) elimination on integer-scaled copies; ``rref`` and the solvers
work with :class:`fractions.Fraction` entries directly.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _integer_rows(rows):
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = math.lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _bareiss(rows):
    """Forward fraction-free elimination in place; returns the rank."""
    m = [list(r) for r in rows]
    if not m:
        return 0, m
    n_rows, n_cols = len(m), len(m[0])
    prev = 1
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        piv = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, n_rows):
            f = m[r][col]
            row_r, row_p = m[r], m[rank]
            for c in range(col, n_cols):
                row_r[c] = (row_r[c] * p - f * row_p[c]) // prev
        prev = p
        rank += 1
    return rank, m


def rank(rows) -> int:
    return _bareiss(_integer_rows(rows))[0]


def det(rows) -> Fraction:
    rows = [[Fraction(x) for x in r] for r in rows]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    ints = []
    for row in rows:
        den = 1
        for x in row:
            den = math.lcm(den, x.denominator)
        scale /= den
        ints.append([int(x * den) for x in row])
    # track the sign of row swaps explicitly
    m = ints
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] * scale


def rref(rows):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m, pivots


def inverse(rows):
    n = len(rows)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def nullspace(rows, n_cols=None):
    """Basis of ``{x : M x = 0}`` as a list of Fraction vectors."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols is required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    red, pivots = rref(rows)
    n_cols = len(red[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]
