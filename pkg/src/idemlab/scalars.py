"""Scalar substrate shared by all modules.

Two scalar modes exist side by side: exact values (`fractions.Fraction` for
reals, `QC` for complex numbers with rational parts) and IEEE binary64.
Exact arithmetic never rounds; float values are only ever compared through
explicit tolerances, never with raw equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

EXACT = "exact"
FLOAT = "float"

DEFAULT_TOL = 1e-9

Scalar = Union[int, float, complex, Fraction, "QC"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact real scalar: {x!r}")


@dataclass(frozen=True)
class QC:
    """Complex scalar with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def lift(x) -> "QC":
        if isinstance(x, QC):
            return x
        return QC(_frac(x), Fraction(0))

    def conj(self) -> "QC":
        return QC(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> "QC":
        return QC(-self.re, -self.im)

    def _binary(self, other, op):
        if isinstance(other, (QC, int, Fraction)):
            return op(QC.lift(other))
        if isinstance(other, (float, complex)):
            return NotImplemented  # handled by the reflected float path
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (QC, int, Fraction)):
            o = QC.lift(other)
            return QC(self.re + o.re, self.im + o.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (QC, int, Fraction)):
            o = QC.lift(other)
            return QC(self.re - o.re, self.im - o.im)
        if isinstance(other, (float, complex)):
            return complex(self) - other
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (QC, int, Fraction)):
            o = QC.lift(other)
            return QC(self.re * o.re - self.im * o.im,
                      self.re * o.im + self.im * o.re)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (QC, int, Fraction)):
            o = QC.lift(other)
            d = o.abs2()
            if d == 0:
                raise ZeroDivisionError("division by zero complex rational")
            n = self * o.conj()
            return QC(n.re / d, n.im / d)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QC.lift(other) / self
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (QC, int, Fraction)):
            o = QC.lift(other)
            return self.re == o.re and self.im == o.im
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def wrap(re: Fraction, im: Fraction) -> Union[Fraction, QC]:
    """Return a Fraction when the imaginary part vanishes, else a QC."""
    return re if im == 0 else QC(re, im)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QC))


def to_complex(x) -> complex:
    if isinstance(x, QC):
        return complex(x)
    return complex(x)


def re_part(x):
    if isinstance(x, QC):
        return x.re
    if isinstance(x, complex):
        return x.real
    return x


def im_part(x):
    if isinstance(x, QC):
        return x.im
    if isinstance(x, complex):
        return x.imag
    if isinstance(x, (int, float, Fraction)):
        return 0
    raise TypeError(f"unsupported scalar: {x!r}")


def is_real(x, tol: float = 0.0) -> bool:
    im = im_part(x)
    if is_exact(x):
        return im == 0
    return abs(im) <= tol


def realify(x, tol: float = DEFAULT_TOL):
    """Drop a vanishing imaginary part (exactly for QC, within tol for complex)."""
    if isinstance(x, QC):
        return x.re if x.im == 0 else x
    if isinstance(x, complex):
        return x.real if abs(x.imag) <= tol else x
    return x


def sort_key(x):
    z = to_complex(x)
    return (z.real, z.imag)


def approx(a, b, tol: float = DEFAULT_TOL, relative: bool = False) -> bool:
    """Tolerance comparison; exact pairs compare exactly."""
    if is_exact(a) and is_exact(b):
        return a == b
    d = abs(to_complex(a) - to_complex(b))
    if relative:
        return d <= tol * max(1.0, abs(to_complex(a)), abs(to_complex(b)))
    return d <= tol


def sqrt_fraction(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if q < 0:
        return None
    if q == 0:
        return Fraction(0)
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def sqrt_exact(z) -> Optional[Union[Fraction, QC]]:
    """Exact square root of a Fraction or QC when one exists in QC, else None."""
    if isinstance(z, int):
        z = Fraction(z)
    if isinstance(z, Fraction):
        if z >= 0:
            return sqrt_fraction(z)
        s = sqrt_fraction(-z)
        return None if s is None else QC(Fraction(0), s)
    if isinstance(z, QC):
        if z.im == 0:
            return sqrt_exact(z.re)
        # (p + qi)^2 = a + bi  =>  p^2 = (a + |z|)/2, q = b / (2p)
        norm = sqrt_fraction(z.abs2())
        if norm is None:
            return None
        p2 = (z.re + norm) / 2
        p = sqrt_fraction(p2)
        if p is None or p == 0:
            return None
        q = z.im / (2 * p)
        return QC(p, q)
    return None


def coerce(x, mode: str):
    """Coerce a raw scalar into the given mode; exact mode rejects floats."""
    if mode == EXACT:
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, QC):
            return x
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"exact mode cannot hold {x!r}")
    if isinstance(x, complex):
        return x
    if isinstance(x, QC):
        return complex(x)
    return float(x)


def infer_mode(values) -> str:
    """Exact when every entry is int/Fraction/QC, float otherwise."""
    return EXACT if all(is_exact(v) for v in values) else FLOAT
