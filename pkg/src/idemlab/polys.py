"""Dense univariate polynomials over the scalar tower, plus the Sylvester
resultant used to eliminate one variable from a pair of plane quadrics.

Coefficient lists are ascending (p[k] is the coefficient of x^k). Degrees
stay at most 4 throughout the package, so everything here is written for
clarity over asymptotics. Exact coefficients (Fraction/QC) keep all
arithmetic exact; float/complex coefficients route root finding through
numpy's companion-matrix solver followed by a Newton polish.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .scalars import QC, is_exact, sqrt_exact, to_complex, wrap

Poly = List  # ascending coefficient list


def trim(p: Sequence) -> list:
    p = list(p)
    while p and _is_zero_coeff(p[-1]):
        p.pop()
    return p


def _is_zero_coeff(c) -> bool:
    if is_exact(c):
        return not bool(c)
    return c == 0


def trim_tol(p: Sequence, tol: float) -> list:
    """Trim treating float coefficients below tol (relative to the largest
    coefficient) as zero; exact coefficients only vanish exactly."""
    p = list(p)
    scale = max((abs(to_complex(c)) for c in p), default=0.0)
    cut = tol * max(1.0, scale)
    while p:
        c = p[-1]
        if is_exact(c):
            if bool(c):
                break
        elif abs(to_complex(c)) > cut:
            break
        p.pop()
    return p


def degree(p: Sequence) -> int:
    """Degree of the trimmed polynomial; -1 for the zero polynomial."""
    return len(trim(p)) - 1


def is_zero(p: Sequence) -> bool:
    return degree(p) < 0


def padd(p, q) -> list:
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else 0
        b = q[k] if k < len(q) else 0
        out.append(a + b)
    return trim(out)


def psub(p, q) -> list:
    return padd(p, [-c for c in q])


def pscale(p, s) -> list:
    return trim([c * s for c in p])


def pmul(p, q) -> list:
    p, q = trim(p), trim(q)
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def peval(p, x):
    acc = 0
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def pderiv(p) -> list:
    return trim([k * c for k, c in enumerate(p)][1:])


def pdivmod(p, q) -> tuple[list, list]:
    """Euclidean division over a field; coefficients must support division."""
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    out = [0] * max(0, len(p) - len(q) + 1)
    lead = q[-1]
    while len(r) >= len(q) and r:
        k = len(r) - len(q)
        f = r[-1] / lead
        out[k] = f
        for i, c in enumerate(q):
            r[k + i] = r[k + i] - f * c
        # the leading term is cancelled by construction; drop it even when
        # float arithmetic leaves dust behind
        r = trim(r[:-1])
    return trim(out), trim(r)


def pgcd(p, q) -> list:
    """Monic gcd over an exact field (Fraction or QC coefficients)."""
    a, b = trim(p), trim(q)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    if not a:
        return []
    return pscale(a, 1 / a[-1])


def square_free_part(p) -> list:
    """p / gcd(p, p') for exact coefficients."""
    d = pderiv(p)
    if is_zero(d):
        return trim(p)
    g = pgcd(p, d)
    if degree(g) <= 0:
        return trim(p)
    q, r = pdivmod(p, g)
    assert is_zero(r)
    return q


def numeric_roots(p, polish: int = 2) -> list[complex]:
    """Roots via numpy's companion matrix, with a short Newton polish."""
    p = trim([to_complex(c) for c in p])
    if len(p) <= 1:
        return []
    coeffs = np.array(list(reversed(p)), dtype=complex)
    roots = [complex(z) for z in np.roots(coeffs)]
    dp = pderiv(p)
    out = []
    for z in roots:
        for _ in range(polish):
            d = peval(dp, z)
            if abs(d) < 1e-300:
                break
            z = z - peval(p, z) / d
        out.append(complex(z))
    return out


def quadratic_roots(p) -> list:
    """Both roots of a degree <= 2 polynomial; exact whenever the
    discriminant has an exact square root in QC, floats otherwise."""
    p = trim(p)
    if len(p) == 3:
        c, b, a = p
        if all(is_exact(v) for v in p):
            disc = b * b - 4 * a * c
            s = sqrt_exact(disc)
            if s is not None:
                r1 = (-b + s) / (2 * a)
                r2 = (-b - s) / (2 * a)
                return [_tidy(r1), _tidy(r2)]
        ac, bc, cc = to_complex(a), to_complex(b), to_complex(c)
        s = np.sqrt(complex(bc * bc - 4 * ac * cc))
        return [(-bc + s) / (2 * ac), (-bc - s) / (2 * ac)]
    if len(p) == 2:
        c, b = p
        if all(is_exact(v) for v in p):
            return [_tidy(-QC.lift(c) / QC.lift(b)) if isinstance(c, QC) or isinstance(b, QC)
                    else -Fraction(c) / Fraction(b)]
        return [-to_complex(c) / to_complex(b)]
    return []


def _tidy(z):
    if isinstance(z, QC) and z.im == 0:
        return z.re
    return z


def exactify_root(p, z: complex, max_den: int = 10 ** 9):
    """Reconstruct an exact rational or QC root from a numeric one, verified
    by exact evaluation; None when no nearby exact root certifies."""
    if not all(is_exact(c) for c in p):
        return None
    for den in (10 ** 4, 10 ** 6, max_den):
        re = Fraction(z.real).limit_denominator(den)
        im = Fraction(z.imag).limit_denominator(den)
        cand = wrap(re, im)
        if peval(p, cand) == 0:
            return cand
    return None


def divide_out(p, r) -> Optional[list]:
    """Divide p by (x - r); exact roots require an exact zero remainder,
    float roots accept a small one. None when r does not divide."""
    q, rem = pdivmod(p, [-r, 1])
    if is_exact(r) and all(is_exact(c) for c in p):
        return q if is_zero(rem) else None
    scale = max((abs(to_complex(c)) for c in p), default=1.0)
    if not rem or abs(to_complex(rem[0])) <= 1e-7 * max(1.0, scale):
        return q
    return None


def all_roots(p, prefer_exact: bool = True) -> list:
    """All roots with multiplicity, mixing exact and numeric scalars.

    Exact inputs: rational and complex-rational roots are recovered exactly
    (via the square-free part and verified reconstruction, or the quadratic
    formula), irrational ones fall back to polished floats. Multiplicities
    come from repeated exact division.
    """
    p = trim(p)
    if len(p) <= 1:
        return []
    exact_in = all(is_exact(c) for c in p)
    if degree(p) <= 2:
        return quadratic_roots(p)
    roots: list = []
    work = list(p)
    if exact_in and prefer_exact:
        sf = square_free_part(work)
        for z in numeric_roots(sf):
            r = exactify_root(sf, z)
            if r is None:
                continue
            while True:
                q = divide_out(work, r)
                if q is None:
                    break
                roots.append(r)
                work = q
        work = trim(work)
        if degree(work) <= 0:
            return _sorted_roots(roots)
        if degree(work) <= 2:
            return _sorted_roots(roots + quadratic_roots(work))
    roots.extend(numeric_roots(work))
    return _sorted_roots(roots)


def _sorted_roots(roots: list) -> list:
    return sorted(roots, key=lambda z: (to_complex(z).real, to_complex(z).imag))


# -- resultants -------------------------------------------------------------
#
# A plane quadric pair is held as a polynomial in y whose coefficients are
# polynomials in x: ypoly[j] is the x-poly multiplying y^j.

YPoly = List[list]


def ypoly_trim(f: YPoly) -> YPoly:
    f = [trim(c) for c in f]
    while f and is_zero(f[-1]):
        f.pop()
    return f


def ypoly_eval_x(f: YPoly, x) -> list:
    """Specialize the x variable, leaving a univariate polynomial in y."""
    return trim([peval(c, x) for c in f])


def poly_mat_det(m: list[list[list]]) -> list:
    """Determinant of a small matrix with polynomial entries (cofactors)."""
    n = len(m)
    if n == 1:
        return trim(m[0][0])
    if n == 2:
        return psub(pmul(m[0][0], m[1][1]), pmul(m[0][1], m[1][0]))
    acc: list = []
    for j in range(n):
        if is_zero(m[0][j]):
            continue
        minor = [[m[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = pmul(m[0][j], poly_mat_det(minor))
        acc = padd(acc, term) if j % 2 == 0 else psub(acc, term)
    return acc


def resultant_y(f: YPoly, g: YPoly) -> Optional[list]:
    """Resultant of f and g with respect to y, as a polynomial in x.

    Uses the actual y-degrees. When one argument is y-free the convention
    Res(a(x), g) = a(x)^deg(g) applies. None when both are y-free (no
    elimination is possible in this direction).
    """
    f, g = ypoly_trim(f), ypoly_trim(g)
    df, dg = len(f) - 1, len(g) - 1
    if df < 0 or dg < 0:
        return []
    if df == 0 and dg == 0:
        return None
    if df == 0:
        out = [1]
        for _ in range(dg):
            out = pmul(out, f[0])
        return out
    if dg == 0:
        out = [1]
        for _ in range(df):
            out = pmul(out, g[0])
        return out
    size = df + dg
    rows: list[list[list]] = []
    for k in range(dg):
        row = [[] for _ in range(size)]
        for j, c in enumerate(f):
            row[k + df - j] = list(c)
        rows.append(row)
    for k in range(df):
        row = [[] for _ in range(size)]
        for j, c in enumerate(g):
            row[k + dg - j] = list(c)
        rows.append(row)
    return poly_mat_det(rows)
