"""Constructive sources of test algebras.

* ``construct_from_spectrum`` builds a 2D algebra realizing a prescribed
  admissible eigenvalue triple on the basis of two idempotents, with the
  third idempotent and its spectrum verified internally.
* ``make_family`` exposes the named examples (the H(tau) one-parameter
  family, direct products of lines, the 3D circle algebra, spin factors),
  each with an expected-analysis fixture attached for test use.
* ``random_generic_2d`` / ``random_generic_3d`` are seeded fuzzing sources.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .algebra import Algebra, AlgebraError
from .classify import (BoundaryError, ConfigType, charge, third_eigenvalue,
                       verify_spectral_syzygy)
from .scalars import EXACT, FLOAT, is_exact
from .solve import GenericityStatus


@dataclass(frozen=True)
class FamilySpec:
    algebra: Algebra
    expected: dict = field(default_factory=dict)


def is_admissible_spectrum(triple: Sequence, tol: float = 1e-12) -> bool:
    res = verify_spectral_syzygy(*triple)
    ok = res == 0 if all(is_exact(v) for v in triple) else abs(res) <= tol
    return ok and all(v != Fraction(1, 2) if is_exact(v) else abs(v - 0.5) > tol
                      for v in triple)


def construct_from_spectrum(triple: Sequence, verify: bool = True) -> Algebra:
    """2D algebra whose three nonzero idempotents carry the given
    nontrivial Peirce eigenvalues.

    On the basis (c1, c2) of two idempotents the product is
    c1 c2 = l2 c1 + l1 c2, and the third idempotent is
    c3 = a2 c1 + a1 c2 with a_i = (2 l_i - 1)/(4 l1 l2 - 1). When the seed
    pair hits 4 l1 l2 = 1 the construction is retried on the other two
    pairings of the (unordered) triple.
    """
    triple = tuple(triple)
    if len(triple) != 3:
        raise ValueError("need exactly three eigenvalues")
    exact = all(is_exact(v) for v in triple)
    res = verify_spectral_syzygy(*triple)
    if (res != 0) if exact else abs(res) > 1e-9:
        raise BoundaryError(f"spectrum triple violates the spectral "
                            f"identity (residual {res})")
    for v in triple:
        bad = (v == Fraction(1, 2)) if is_exact(v) else abs(v - 0.5) <= 1e-12
        if bad:
            raise BoundaryError("eigenvalue 1/2 is excluded")
    pairings = ((0, 1, 2), (0, 2, 1), (1, 2, 0))
    last_error: Optional[Exception] = None
    for i, j, k in pairings:
        l1, l2, l3 = triple[i], triple[j], triple[k]
        den = 4 * l1 * l2 - 1
        if den == 0:
            last_error = BoundaryError("4*l1*l2 = 1 for this pairing")
            continue
        gamma = [[[1, 0], [l2, l1]], [[l2, l1], [0, 1]]]
        a = Algebra.from_gamma(gamma, label="constructed-from-spectrum")
        if verify:
            _verify_third_idempotent(a, (l1, l2, l3))
        return a
    raise last_error or BoundaryError("no admissible pairing")


def _verify_third_idempotent(a: Algebra, triple: Sequence) -> None:
    l1, l2, l3 = triple
    den = 4 * l1 * l2 - 1
    alpha1 = (2 * l1 - 1) / den
    alpha2 = (2 * l2 - 1) / den
    c3 = (alpha2, alpha1)
    sq = a.square(c3)
    exact = all(is_exact(v) for v in c3)
    if exact:
        if sq != c3:
            raise AssertionError("constructed c3 is not idempotent")
    elif max(abs(u - v) for u, v in zip(sq, c3)) > 1e-9:
        raise AssertionError("constructed c3 is not idempotent")
    spec = a.peirce_spectrum(c3)
    key = lambda t: (to_complex(t).real, to_complex(t).imag)
    target = sorted((Fraction(1) if is_exact(l3) else 1.0, l3), key=key)
    got = sorted(spec, key=key)
    for g, t in zip(got, target):
        if is_exact(g) and is_exact(t):
            if g != t:
                raise AssertionError(f"sigma(c3) is {spec}, expected {{1, {l3}}}")
        elif abs(to_complex(g) - to_complex(t)) > 1e-7:
            raise AssertionError(f"sigma(c3) is {spec}, expected {{1, {l3}}}")


# -- named families -----------------------------------------------------------

def h_tau(tau=None, tau_squared=None) -> FamilySpec:
    """The one-parameter plane family with product
    (x1 y1 - x2 y2, (1 - tau^2)/2 * (x1 y2 + x2 y1)), tau > 0, tau != 1.

    The structure constants depend on tau only through tau^2, so passing
    tau_squared keeps the algebra exact for irrational tau.
    """
    if (tau is None) == (tau_squared is None):
        raise ValueError("pass exactly one of tau, tau_squared")
    if tau_squared is None:
        t = Fraction(tau) if is_exact(tau) or isinstance(tau, str) else float(tau)
        t2 = t * t
        tau_val = t
    else:
        t2 = Fraction(tau_squared) if is_exact(tau_squared) else float(tau_squared)
        tau_val = math.sqrt(float(t2))
    if t2 == 0 or t2 == 1 or (is_exact(t2) and t2 < 0) or \
            (not is_exact(t2) and float(t2) <= 0):
        raise ValueError("tau must be positive and different from 1")
    half = Fraction(1, 2) if is_exact(t2) else 0.5
    w = half * (1 - t2)
    gamma = [[[1, 0], [0, w]], [[0, w], [-1, 0]]]
    a = Algebra.from_gamma(gamma, label=f"h-tau(tau^2={t2})")
    one = Fraction(1) if is_exact(t2) else 1.0
    denom = one - t2
    if is_exact(t2):
        tau_exact = None
        if isinstance(tau_val, Fraction):
            tau_exact = tau_val
        c1 = None
        if tau_exact is not None:
            c1 = (1 / denom, -tau_exact / denom)
            c2 = (1 / denom, tau_exact / denom)
        else:
            c1 = (float(1 / denom), -tau_val / float(denom))
            c2 = (float(1 / denom), tau_val / float(denom))
    else:
        c1 = (1.0 / denom, -tau_val / denom)
        c2 = (1.0 / denom, tau_val / denom)
    lam12 = (1 + t2) / (2 * (1 - t2))
    lam3 = w
    above_one = t2 > 1
    expected = {
        "idempotents": ((0, 0) if is_exact(t2) else (0.0, 0.0),
                        c1, c2, (1, 0) if is_exact(t2) else (1.0, 0.0)),
        "spectrum_triple": (lam12, lam12, lam3),
        "config_type": ConfigType.TYPE_I if above_one else ConfigType.TYPE_II,
        "verdict_status": GenericityStatus.GENERIC,
        "real_generic": True,
    }
    return FamilySpec(algebra=a, expected=expected)


def direct_product(n: int) -> FamilySpec:
    """Direct product of n copies of the ground line: squares act
    componentwise, idempotents are all 0/1 vectors."""
    if not 1 <= n <= 4:
        raise ValueError("supported dimensions are 1..4")
    gamma = [[[1 if i == j == k else 0 for k in range(n)] for j in range(n)]
             for i in range(n)]
    a = Algebra.from_gamma(gamma, label=f"product{n}")
    idems = []
    for mask in range(2 ** n):
        idems.append(tuple(Fraction((mask >> i) & 1) for i in range(n)))
    expected = {
        "idempotents": tuple(idems),
        "verdict_status": GenericityStatus.GENERIC,
        "real_generic": True,
    }
    if n == 2:
        expected["config_type"] = ConfigType.TYPE_III
        expected["charges"] = (Fraction(-1), Fraction(1), Fraction(1),
                               Fraction(-1))
        expected["spectrum_triple"] = (Fraction(0), Fraction(0), Fraction(1))
    return FamilySpec(algebra=a, expected=expected)


def circle3d() -> FamilySpec:
    """The 3D algebra with square map
    (x1^2 - x2 x3, x2^2 - x1 x3, x3^2 - x1 x2): its nonzero idempotents
    form a circle and every one carries the spectrum {1, 1/2, -1/2}."""
    from .io import from_quadratic_map, parse_square_map_dsl
    f = parse_square_map_dsl(
        "x1^2 - x2*x3, x2^2 - x1*x3, x3^2 - x1*x2", label="circle3d")
    a = from_quadratic_map(f)
    w = -0.5 + (math.sqrt(3) / 2) * 1j
    expected = {
        "verdict_status": GenericityStatus.NON_GENERIC_HALF_SPECTRUM,
        "continuum": True,
        "spectrum": (Fraction(-1, 2), Fraction(1, 2), Fraction(1)),
        "sample_idempotents": ((Fraction(1), Fraction(0), Fraction(0)),
                               (Fraction(0), Fraction(1), Fraction(0)),
                               (Fraction(0), Fraction(0), Fraction(1))),
        "nilpotent_directions": ((1.0, 1.0, 1.0), (1.0, w, w ** 2),
                                 (1.0, w ** 2, w)),
    }
    return FamilySpec(algebra=a, expected=expected)


def spin_factor(b: Optional[Sequence] = None, n: int = 2) -> FamilySpec:
    """Unital algebra on R x R^n with product
    (x0, x)(y0, y) = (x0 y0 + b(x, y), x0 y + y0 x) for a symmetric bilinear
    form b; for positive-definite b the nonunital idempotents form a sphere
    and carry the spectrum {1, 0, 1/2, ..., 1/2}."""
    if b is None:
        b = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
             for i in range(n)]
    n = len(b)
    if any(len(row) != n for row in b):
        raise ValueError("b must be square")
    for i in range(n):
        for j in range(n):
            if b[i][j] != b[j][i]:
                raise ValueError("b must be symmetric")
    dim = n + 1
    if dim > 4:
        raise ValueError("supported dimensions are 1..4")
    gamma = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    gamma[0][0][0] = 1
    for i in range(1, dim):
        gamma[0][i][i] = 1
        gamma[i][0][i] = 1
        for j in range(1, dim):
            gamma[i][j][0] = b[i - 1][j - 1]
    a = Algebra.from_gamma(gamma, label=f"spin-factor(n={n})")
    unit = tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(dim))
    sample = None
    if b[0][0] != 0:
        # (1/2, x, 0, ...) with b(x, x) = 1/4 along the first axis
        from .scalars import sqrt_exact
        s = sqrt_exact(Fraction(1, 4) / Fraction(b[0][0]))
        if isinstance(s, Fraction):
            sample = tuple([Fraction(1, 2), s] + [Fraction(0)] * (n - 1))
    expected = {
        "verdict_status": GenericityStatus.NON_GENERIC_HALF_SPECTRUM,
        "unit": unit,
        "nonunital_spectrum": tuple([Fraction(0), Fraction(1, 2)] +
                                    [Fraction(1, 2)] * (n - 2) + [Fraction(1)]),
        "sample_idempotent": sample,
        "continuum": n >= 2,
    }
    return FamilySpec(algebra=a, expected=expected)


def complex_as_real_2d() -> FamilySpec:
    """The complex line viewed as a 2D real algebra (square map
    (x1^2 - x2^2, 2 x1 x2)): generic, but half of its idempotents are not
    real, so it is not real generic."""
    gamma = [[[1, 0], [0, 1]], [[0, 1], [-1, 0]]]
    a = Algebra.from_gamma(gamma, label="complex-as-real")
    expected = {
        "verdict_status": GenericityStatus.GENERIC,
        "real_generic": False,
        "real_idempotents": ((Fraction(0), Fraction(0)),
                             (Fraction(1), Fraction(0))),
    }
    return FamilySpec(algebra=a, expected=expected)


FAMILY_BUILDERS = {
    "h-tau": lambda **kw: h_tau(**kw),
    "product1": lambda **kw: direct_product(1),
    "product2": lambda **kw: direct_product(2),
    "product3": lambda **kw: direct_product(3),
    "product4": lambda **kw: direct_product(4),
    "circle3d": lambda **kw: circle3d(),
    "spin-factor": lambda **kw: spin_factor(**kw),
    "complex-as-real": lambda **kw: complex_as_real_2d(),
}

FAMILY_HELP = {
    "h-tau": "plane family, needs --tau (or --tau-squared); TypeI for tau>1, "
             "TypeII for 0<tau<1",
    "product1": "the ground line",
    "product2": "product of two lines (TypeIII)",
    "product3": "product of three lines (8 idempotents)",
    "product4": "product of four lines (16 idempotents)",
    "circle3d": "3D algebra with a circle of idempotents",
    "spin-factor": "unital algebra on R x R^n, --n picks n (default 2)",
    "complex-as-real": "the complex line as a 2D real algebra",
}


def make_family(name: str, **params) -> FamilySpec:
    if name not in FAMILY_BUILDERS:
        known = ", ".join(sorted(FAMILY_BUILDERS))
        raise ValueError(f"unknown family {name!r} (known: {known})")
    return FAMILY_BUILDERS[name](**params)


# -- randomized sources ---------------------------------------------------------

def random_spectrum_triple(seed: int) -> tuple:
    """Seeded admissible rational triple, away from 1/2 and from
    4 l1 l2 = 1."""
    rng = random.Random(seed)
    while True:
        l1 = Fraction(rng.randint(-18, 18), rng.randint(1, 9))
        l2 = Fraction(rng.randint(-18, 18), rng.randint(1, 9))
        if Fraction(1, 2) in (l1, l2) or 4 * l1 * l2 == 1:
            continue
        l3 = third_eigenvalue(l1, l2)
        return (l1, l2, l3)


def random_invertible_matrix(rng: random.Random, n: int,
                             span: int = 3) -> list:
    while True:
        m = [[Fraction(rng.randint(-span, span)) for _ in range(n)]
             for _ in range(n)]
        if linalg.det(m) != 0:
            return m


def random_generic_2d(seed: int, conjugate: bool = True):
    """(algebra, spectrum triple): a seeded random rational 2D generic
    algebra, optionally written in a scrambled rational basis."""
    triple = random_spectrum_triple(seed)
    a = construct_from_spectrum(triple)
    if conjugate:
        rng = random.Random(seed ^ 0x5EED)
        t = random_invertible_matrix(rng, 2)
        a = a.conjugate(t).with_label(f"random-generic-2d(seed={seed})")
    return a, triple


def random_generic_2d_of_type(config_type: ConfigType, seed: int,
                              conjugate: bool = True):
    """Rejection-sample a random generic 2D algebra of a prescribed type."""
    attempt = 0
    while True:
        triple = random_spectrum_triple(seed * 1009 + attempt)
        signs = [1 if charge(l) > 0 else -1 for l in triple]
        pos = signs.count(1)
        got = {3: ConfigType.TYPE_I, 1: ConfigType.TYPE_II,
               2: ConfigType.TYPE_III}[pos]
        if got == config_type:
            a = construct_from_spectrum(triple)
            if conjugate:
                rng = random.Random((seed * 7919 + attempt) ^ 0xC0FFEE)
                t = random_invertible_matrix(rng, 2)
                a = a.conjugate(t)
            return a.with_label(f"random-{config_type.value}(seed={seed})"), triple
        attempt += 1


def random_generic_3d(seed: int, conjugate: bool = True):
    """(algebra, exact idempotent list): the direct sum of a random 2D
    generic algebra and a line, scrambled by a rational basis change; all
    eight idempotents are known exactly by construction."""
    a2, triple = random_generic_2d(seed, conjugate=False)
    l1, l2, _ = triple
    den = 4 * l1 * l2 - 1
    alpha1 = (2 * l1 - 1) / den
    alpha2 = (2 * l2 - 1) / den
    base2 = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
             (Fraction(0), Fraction(1)), (alpha2, alpha1)]
    gamma = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                gamma[i][j][k] = a2.gamma[i][j][k]
    gamma[2][2][2] = Fraction(1)
    a3 = Algebra.from_gamma(gamma, label=f"random-generic-3d(seed={seed})")
    points = [tuple(list(p) + [e]) for p in base2
              for e in (Fraction(0), Fraction(1))]
    if conjugate:
        rng = random.Random(seed ^ 0x3D3D)
        t = random_invertible_matrix(rng, 3)
        a3 = a3.conjugate(t).with_label(a3.label)
        tinv = linalg.inverse(t)
        points = [tuple(linalg.mat_vec(tinv, list(p))) for p in points]
    return a3, points
