"""Commutative nonassociative algebras of dimension 1..4.

An algebra is a structure-constant tensor gamma with e_i * e_j =
sum_k gamma[i][j][k] e_k. Elements are plain coordinate tuples; all values
are immutable and every operation is a pure function, so instances are safe
to share across workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from . import linalg
from .scalars import (DEFAULT_TOL, EXACT, FLOAT, coerce, infer_mode, is_exact,
                      is_real, realify, sort_key, to_complex)

Element = Tuple


class AlgebraError(ValueError):
    pass


class DimensionMismatchError(AlgebraError):
    pass


MAX_DIM = 4


@dataclass(frozen=True)
class Algebra:
    dim: int
    gamma: tuple  # gamma[i][j][k], commutative in (i, j)
    label: str = ""
    mode: str = EXACT

    @staticmethod
    def from_gamma(gamma, label: str = "", mode: Optional[str] = None) -> "Algebra":
        n = len(gamma)
        if not 1 <= n <= MAX_DIM:
            raise AlgebraError(f"supported dimensions are 1..{MAX_DIM}, got {n}")
        flat = [gamma[i][j][k] for i in range(n) for j in range(n) for k in range(n)]
        if len(flat) != n ** 3:
            raise AlgebraError("structure tensor is not n x n x n")
        if mode is None:
            mode = infer_mode([v for v in flat if not isinstance(v, str)])
            if any(isinstance(v, str) for v in flat):
                mode = EXACT
        g = tuple(tuple(tuple(coerce(gamma[i][j][k], mode) for k in range(n))
                        for j in range(n)) for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                if g[i][j] != g[j][i]:
                    raise AlgebraError(
                        f"structure constants not commutative at ({i},{j})")
        return Algebra(dim=n, gamma=g, label=label, mode=mode)

    def with_label(self, label: str) -> "Algebra":
        return replace(self, label=label)

    def _check_dim(self, x: Sequence) -> None:
        if len(x) != self.dim:
            raise DimensionMismatchError(
                f"element of length {len(x)} in a {self.dim}-dim algebra")

    def mul(self, x: Sequence, y: Sequence) -> Element:
        """Bilinear commutative product of two coordinate vectors."""
        self._check_dim(x)
        self._check_dim(y)
        n = self.dim
        out = []
        for k in range(n):
            acc = 0
            for i in range(n):
                xi = x[i]
                if xi == 0:
                    continue
                for j in range(n):
                    c = self.gamma[i][j][k]
                    if c == 0:
                        continue
                    acc = acc + xi * y[j] * c
            out.append(acc)
        return tuple(out)

    def square(self, x: Sequence) -> Element:
        return self.mul(x, x)

    def psi(self, x: Sequence) -> Element:
        """The fixed-point field x^2 - x whose zeros are the idempotents."""
        sq = self.square(x)
        return tuple(sq[i] - x[i] for i in range(self.dim))

    def mult_operator(self, c: Sequence) -> tuple:
        """Matrix of left multiplication by c; column j is c * e_j."""
        self._check_dim(c)
        n = self.dim
        cols = []
        for j in range(n):
            e = tuple(1 if i == j else 0 for i in range(n))
            cols.append(self.mul(c, e))
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def peirce_spectrum(self, c: Sequence) -> tuple:
        """Eigenvalue multiset of the multiplication operator by c,
        sorted by (re, im); exact entries are kept exact when possible."""
        m = self.mult_operator(c)
        vals = linalg.eigenvalues([list(r) for r in m])
        return tuple(vals)

    def chi_at_half(self, c: Sequence):
        """det(L_c - 1/2 I), the characteristic value that carries the
        topological index of the idempotent."""
        m = self.mult_operator(c)
        half = Fraction(1, 2) if self.mode == EXACT and element_is_exact(c) \
            else 0.5
        shifted = linalg.mat_sub_scaled_identity([list(r) for r in m], half)
        return linalg.det(shifted)

    def conjugate(self, t: Sequence[Sequence]) -> "Algebra":
        """Transport the product through an invertible basis change T:
        x *' y = T^-1 (Tx * Ty). Idempotents map by T^-1, spectra persist."""
        n = self.dim
        if len(t) != n or any(len(r) != n for r in t):
            raise DimensionMismatchError("basis-change matrix has wrong shape")
        mode = self.mode if infer_mode([v for r in t for v in r]) == EXACT \
            else FLOAT
        tm = [[coerce(v, mode) for v in r] for r in t]
        cols = [linalg.mat_vec(tm, [1 if i == j else 0 for i in range(n)])
                for j in range(n)]
        gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                p = self.mul(cols[i], cols[j])
                back = linalg.solve(tm, list(p))
                for k in range(n):
                    gamma[i][j][k] = back[k]
                    gamma[j][i][k] = back[k]
        return Algebra.from_gamma(gamma, label=self.label, mode=mode)

    def to_float(self) -> "Algebra":
        if self.mode == FLOAT:
            return self
        g = [[[float(self.gamma[i][j][k]) for k in range(self.dim)]
              for j in range(self.dim)] for i in range(self.dim)]
        return Algebra.from_gamma(g, label=self.label, mode=FLOAT)


# -- element helpers ---------------------------------------------------------

def element_is_exact(x: Sequence) -> bool:
    return all(is_exact(v) for v in x)


def element_is_real(x: Sequence, tol: float = DEFAULT_TOL) -> bool:
    return all(is_real(v, tol) for v in x)


def element_realify(x: Sequence, tol: float = DEFAULT_TOL) -> Element:
    return tuple(realify(v, tol) for v in x)


def element_sort_key(x: Sequence) -> tuple:
    return tuple(sort_key(v) for v in x)


def element_norm(x: Sequence) -> float:
    return max((abs(to_complex(v)) for v in x), default=0.0)


def element_sub(x: Sequence, y: Sequence) -> Element:
    return tuple(a - b for a, b in zip(x, y))


def element_add(x: Sequence, y: Sequence) -> Element:
    return tuple(a + b for a, b in zip(x, y))


def element_scale(x: Sequence, s) -> Element:
    return tuple(s * a for a in x)


def elements_close(x: Sequence, y: Sequence, tol: float = DEFAULT_TOL) -> bool:
    if element_is_exact(x) and element_is_exact(y):
        return tuple(x) == tuple(y)
    return all(abs(to_complex(a) - to_complex(b)) <=
               tol * max(1.0, abs(to_complex(a)), abs(to_complex(b)))
               for a, b in zip(x, y))


def spectrum_contains(spectrum: Sequence, value, tol: float = DEFAULT_TOL) -> bool:
    for mu in spectrum:
        if is_exact(mu) and is_exact(value):
            if mu == value:
                return True
        elif abs(to_complex(mu) - to_complex(value)) <= tol:
            return True
    return False
