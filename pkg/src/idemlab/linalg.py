"""Small dense matrices over the scalar tower (dims 1..4).

Everything is generic over Fraction / QC / float / complex entries:
Gaussian elimination picks pivots by float magnitude but performs the
arithmetic in the entries' own field, so exact inputs give exact results.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polys import all_roots
from .scalars import to_complex

Matrix = Sequence[Sequence]


class SingularMatrixError(ValueError):
    pass


def identity(n: int, one=Fraction(1)) -> list[list]:
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_vec(m: Matrix, v: Sequence) -> list:
    return [sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m))]


def mat_mul(a: Matrix, b: Matrix) -> list[list]:
    n, k, p = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(p)]
            for i in range(n)]


def mat_sub_scaled_identity(m: Matrix, s) -> list[list]:
    return [[m[i][j] - s if i == j else m[i][j] for j in range(len(m))]
            for i in range(len(m))]


def trace(m: Matrix):
    t = m[0][0]
    for i in range(1, len(m)):
        t = t + m[i][i]
    return t


def _pivot_row(rows, col, start):
    best, best_mag = None, 0.0
    for i in range(start, len(rows)):
        mag = abs(to_complex(rows[i][col]))
        if mag > best_mag:
            best, best_mag = i, mag
        elif best is None and rows[i][col] != 0:
            best = i
    return best if best_mag > 0.0 else None


def det(m: Matrix):
    n = len(m)
    rows = [list(r) for r in m]
    sign = 1
    acc = None
    for col in range(n):
        piv = _pivot_row(rows, col, col)
        if piv is None:
            return m[0][0] - m[0][0]  # zero of the right type
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            sign = -sign
        p = rows[col][col]
        acc = p if acc is None else acc * p
        for i in range(col + 1, n):
            f = rows[i][col] / p
            for j in range(col, n):
                rows[i][j] = rows[i][j] - f * rows[col][j]
    return acc if sign == 1 else -acc


def solve(m: Matrix, rhs: Sequence) -> list:
    """Solve m x = rhs by elimination; raises on a singular matrix."""
    n = len(m)
    rows = [list(r) + [rhs[i]] for i, r in enumerate(m)]
    for col in range(n):
        piv = _pivot_row(rows, col, col)
        if piv is None:
            raise SingularMatrixError("singular linear system")
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        for i in range(n):
            if i == col:
                continue
            f = rows[i][col] / p
            if f != 0:
                for j in range(col, n + 1):
                    rows[i][j] = rows[i][j] - f * rows[col][j]
    return [rows[i][n] / rows[i][i] for i in range(n)]


def inverse(m: Matrix) -> list[list]:
    n = len(m)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        cols.append(solve(m, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def charpoly(m: Matrix) -> list:
    """Coefficients (ascending) of det(t*I - m) by Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [list(r) for r in m]
    for k in range(1, n + 1):
        ck = -trace(mk) / k if k > 1 else -trace(mk)
        coeffs[n - k] = ck
        if k < n:
            shifted = [[mk[i][j] + (ck if i == j else 0) for j in range(n)]
                       for i in range(n)]
            mk = mat_mul(m, shifted)
    return coeffs


def eigenvalues(m: Matrix) -> list:
    """Eigenvalue multiset (dims 1..4) via the characteristic polynomial."""
    return all_roots(charpoly(m))


def rank(m: Matrix, tol: float = 0.0) -> int:
    """Row rank; float entries treat pivots below tol (times scale) as zero."""
    rows = [list(r) for r in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    scale = max((abs(to_complex(c)) for r in rows for c in r), default=0.0)
    cut = tol * max(1.0, scale)
    r = 0
    for col in range(ncols):
        piv, mag = None, cut
        for i in range(r, len(rows)):
            m_ = abs(to_complex(rows[i][col]))
            if m_ > mag:
                piv, mag = i, m_
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(r + 1, len(rows)):
            f = rows[i][col] / p
            for j in range(col, ncols):
                rows[i][j] = rows[i][j] - f * rows[r][j]
        r += 1
        if r == len(rows):
            break
    return r
