"""Idempotent and 2-nilpotent solvers, plus the genericity verdict.

Two routes exist and cross-check each other:

* an exact 2D route that eliminates one variable from the fixed-point
  system x^2 = x with a Sylvester resultant over the rationals, recovers
  exact roots where the eliminant factors over Q (or the Gaussian
  rationals), and attributes any drop from the Bezout count 4 to solutions
  at infinity, which are exactly the nilpotent directions;
* a numeric multistart Newton route for dimensions up to 4, seeded
  deterministically, deduplicated and sorted so that parallel and serial
  runs produce identical output.

The numeric route is a heuristic by design: when it finds fewer than 2^n
points and no continuum evidence, the verdict is Undetermined rather than
a guess.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import polys
from .algebra import (Algebra, element_is_exact, element_is_real,
                      element_norm, element_realify, element_sort_key,
                      elements_close, spectrum_contains)
from .scalars import DEFAULT_TOL, EXACT, is_exact, realify, to_complex


class GenericityStatus(str, enum.Enum):
    GENERIC = "Generic"
    NON_GENERIC_CONTINUUM = "NonGenericContinuum"
    NON_GENERIC_HALF_SPECTRUM = "NonGenericHalfSpectrum"
    NON_GENERIC_MULTIPLE = "NonGenericMultiple"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class SolverConfig:
    starts: Optional[int] = None  # default 200 * 2^dim
    seed: int = 0
    dedup: float = 1e-6
    residual_tol: float = 1e-12
    max_iter: int = 50
    tol: float = DEFAULT_TOL


@dataclass(frozen=True)
class IdempotentRecord:
    point: tuple
    spectrum: tuple
    chi_half: object
    charge: object  # -1/(4 chi); populated in dimension 2, None otherwise
    index: Optional[int]  # sign of chi_half, None on the genericity boundary
    is_real: bool

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.point)


@dataclass(frozen=True)
class NilpotentDirection:
    direction: tuple  # first nonzero coordinate normalized to 1
    is_real: bool


@dataclass(frozen=True)
class GenericityVerdict:
    status: GenericityStatus
    evidence: dict


@dataclass(frozen=True)
class IdempotentScan:
    records: tuple
    continuum: bool = False
    witness_line: Optional[tuple] = None  # (point, direction)
    at_infinity: Optional[int] = None  # Bezout deficit, exact 2D route only
    method: str = "numeric"


@dataclass(frozen=True)
class NilpotentScan:
    directions: tuple
    continuum: bool = False


INDEX_BOUNDARY = 1e-7


def _record(a: Algebra, point: Sequence, tol: float) -> IdempotentRecord:
    point = tuple(point)
    spectrum = a.peirce_spectrum(point)
    chi = a.chi_at_half(point)
    chi_real = realify(chi, tol) if not is_exact(chi) else chi
    charge = None
    if a.dim == 2:
        if chi_real != 0:
            charge = Fraction(-1, 4) / chi_real if is_exact(chi_real) \
                else -0.25 / chi_real
    index = None
    if isinstance(chi_real, (int, Fraction)):
        if chi_real != 0:
            index = 1 if chi_real > 0 else -1
    elif not is_exact(chi_real):
        z = to_complex(chi_real)
        if abs(z.imag) <= tol and abs(z.real) > INDEX_BOUNDARY:
            index = 1 if z.real > 0 else -1
    # an exact complex chi (complex idempotent) carries no sign
    return IdempotentRecord(point=point, spectrum=spectrum, chi_half=chi_real,
                            charge=charge, index=index,
                            is_real=element_is_real(point, tol))


def _dedup_sorted(points: list, tol: float) -> list:
    out: list = []
    for p in sorted(points, key=element_sort_key):
        if not any(elements_close(p, q, tol) for q in out):
            out.append(p)
    return out


# -- exact 2D route -----------------------------------------------------------

_SHEARS = (0, 1, 2, 3)


def _psi_as_ypoly(a: Algebra, k: int) -> list:
    """Component k of x^2 - x as a polynomial in y = x2 with coefficients
    in Q[x1]."""
    g = a.gamma
    # square component k: g[0][0][k] x^2 + 2 g[0][1][k] x y + g[1][1][k] y^2
    c_y0 = [0, 0, g[0][0][k]]
    c_y1 = [0, 2 * g[0][1][k]]
    c_y2 = [g[1][1][k]]
    if k == 0:
        c_y0 = polys.psub(c_y0, [0, 1])
    else:
        c_y1 = polys.psub(c_y1, [1])
    return polys.ypoly_trim([c_y0, c_y1, c_y2])


def _shear_matrix(s: int) -> list:
    return [[Fraction(1), Fraction(0)], [Fraction(s), Fraction(1)]]


def _fiber_roots(q1: list, q2: list, tol: float) -> Optional[list]:
    """Common roots of the two fiber polynomials; None marks an identically
    zero fiber (a whole vertical line of solutions)."""
    q1 = polys.trim_tol(q1, 1e-12)
    q2 = polys.trim_tol(q2, 1e-12)
    if polys.is_zero(q1) and polys.is_zero(q2):
        return None
    candidates_from = [q for q in (q1, q2) if polys.degree(q) >= 1]
    if not candidates_from:
        return []
    base = min(candidates_from, key=polys.degree)
    other = q2 if base is q1 else q1
    roots = polys.all_roots(base)
    out = []
    for r in roots:
        if polys.is_zero(other):
            out.append(r)
            continue
        val = polys.peval(other, r)
        if is_exact(val):
            if val == 0:
                out.append(r)
        elif abs(to_complex(val)) <= tol * max(1.0, abs(to_complex(r)) ** 2):
            out.append(r)
    return out


def _validate_idempotent(a: Algebra, p: Sequence, tol: float) -> bool:
    res = a.psi(p)
    if element_is_exact(res):
        return all(v == 0 for v in res)
    scale = max(1.0, element_norm(p) ** 2)
    return element_norm(res) <= tol * scale


def idempotents_2d_exact(a: Algebra, tol: float = DEFAULT_TOL) -> IdempotentScan:
    """All complex solutions of x^2 = x for an exact 2D algebra.

    Eliminates x2 by a resultant; if elimination degenerates, retries after
    a deterministic rational shear and maps the solutions back. An
    identically zero eliminant or an identically zero fiber is a continuum
    of idempotents (reported with a witness line when one is found).
    """
    if a.dim != 2:
        raise ValueError("exact route requires dimension 2")
    if a.mode != EXACT:
        raise ValueError("exact route requires rational structure constants")
    for s in _SHEARS:
        t = _shear_matrix(s)
        a_s = a.conjugate(t) if s else a
        p1 = _psi_as_ypoly(a_s, 0)
        p2 = _psi_as_ypoly(a_s, 1)
        if len(p1) - 1 <= 0 and len(p2) - 1 <= 0:
            continue
        r = polys.resultant_y(p1, p2)
        if r is None or polys.is_zero(r):
            continue
        points: list = []
        continuum = False
        witness = None
        for x1 in polys.all_roots(polys.square_free_part(r)):
            q1 = polys.ypoly_eval_x(p1, x1)
            q2 = polys.ypoly_eval_x(p2, x1)
            fiber = _fiber_roots(q1, q2, tol)
            if fiber is None:
                continuum = True
                base = _apply_matrix(t, (x1, 0))
                direction = _apply_matrix(t, (0, 1))
                witness = (tuple(base), tuple(direction))
                continue
            for y in fiber:
                cand = _apply_matrix(t, (x1, y))
                if _validate_idempotent(a, cand, tol):
                    points.append(tuple(cand))
        zero = (Fraction(0), Fraction(0))
        if not any(elements_close(zero, p, tol) for p in points):
            points.append(zero)
        points = _dedup_sorted(points, tol)
        records = tuple(_record(a, p, tol) for p in points)
        deficit = 4 - (len(polys.trim(r)) - 1)
        return IdempotentScan(records=records, continuum=continuum,
                              witness_line=witness, at_infinity=deficit,
                              method="exact")
    # every elimination direction collapsed: a common curve of idempotents
    witness = _continuum_witness(a, tol)
    zero = (Fraction(0), Fraction(0))
    records = (_record(a, zero, tol),)
    return IdempotentScan(records=records, continuum=True,
                          witness_line=witness, at_infinity=None,
                          method="exact")


def _apply_matrix(t: Sequence, v: Sequence) -> tuple:
    n = len(t)
    return tuple(sum(t[i][j] * v[j] for j in range(n)) for i in range(n))


def _continuum_witness(a: Algebra, tol: float) -> Optional[tuple]:
    """Look for a witness line of idempotents through numerically found
    points; Proposition-style: three collinear idempotents force the line."""
    scan = idempotents_numeric(a.to_float(), SolverConfig(starts=400))
    pts = [r.point for r in scan.records if r.is_real and not r.is_zero]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            c1, c2 = pts[i], pts[j]
            third = tuple(2 * u - v for u, v in zip(c1, c2))
            if _validate_idempotent(a, third, 1e-6):
                direction = tuple(u - v for u, v in zip(c1, c2))
                return (tuple(c1), direction)
    return None


# -- numeric multistart route --------------------------------------------------

def _gamma_array(a: Algebra) -> np.ndarray:
    n = a.dim
    g = np.empty((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                g[i, j, k] = to_complex(a.gamma[i][j][k])
    return g


def _batch_square(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("bi,bj,ijk->bk", x, x, g)


def _batch_mult_operator(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    # (L_x)[k, j] = sum_i x_i g[i, j, k]
    return np.einsum("bi,ijk->bkj", x, g)


def _newton_starts(n: int, m: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    canonical = [np.zeros(n)]
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        canonical.extend([e, -e, 0.5 * e])
    canonical.append(np.full(n, 0.5))
    canon = np.array(canonical, dtype=complex)
    m_rand = max(0, m - len(canon))
    half = m_rand // 2
    real = rng.normal(scale=1.5, size=(half, n)).astype(complex)
    cplx = rng.normal(scale=1.2, size=(m_rand - half, n)) + \
        1j * rng.normal(scale=1.2, size=(m_rand - half, n))
    return np.concatenate([canon, real, cplx], axis=0)


def idempotents_numeric(a: Algebra, cfg: Optional[SolverConfig] = None) -> IdempotentScan:
    """Multistart Newton on x^2 - x from a seeded deterministic start set.

    Deduplicates at cfg.dedup, polishes to residual <= cfg.residual_tol and
    reports continuum suspicion when more than 2^n distinct points converge
    or the Jacobian at a converged point is singular.
    """
    cfg = cfg or SolverConfig()
    n = a.dim
    g = _gamma_array(a)
    m = cfg.starts if cfg.starts is not None else 200 * 2 ** n
    x = _newton_starts(n, m, cfg.seed)
    eye = np.eye(n, dtype=complex)
    with np.errstate(all="ignore"):
        for _ in range(cfg.max_iter):
            fx = _batch_square(g, x) - x
            jac = 2.0 * _batch_mult_operator(g, x) - eye
            try:
                step = np.linalg.solve(jac, fx[..., None])[..., 0]
            except np.linalg.LinAlgError:
                jac = jac + 1e-12 * eye
                step = np.linalg.solve(jac, fx[..., None])[..., 0]
            x = x - step
            bad = ~np.isfinite(x).all(axis=1)
            x[bad] = 0.0
        fx = _batch_square(g, x) - x
        res = np.max(np.abs(fx), axis=1)
        scale = np.maximum(1.0, np.max(np.abs(x), axis=1) ** 2)
    keep = x[res <= cfg.residual_tol * scale]
    points = [tuple(complex(v) for v in row) for row in keep]
    # nonzero idempotents are bounded away from 0, so snap the origin cluster
    # onto the exact zero idempotent, which is always a solution
    points = [p for p in points if element_norm(p) > cfg.tol]
    points.append(tuple(0.0 for _ in range(n)))
    points = [element_realify(p, cfg.tol) for p in points]
    points = _dedup_sorted(points, cfg.dedup)
    singular = False
    for p in points:
        jac = 2.0 * _batch_mult_operator(g, np.array([[to_complex(v) for v in p]]))[0] - eye
        if abs(np.linalg.det(jac)) <= 1e-8:
            singular = True
            break
    continuum = singular or len(points) > 2 ** n
    records = tuple(_record(a, p, cfg.tol) for p in points)
    return IdempotentScan(records=records, continuum=continuum,
                          witness_line=None, at_infinity=None,
                          method="numeric")


def solve_idempotents(a: Algebra, cfg: Optional[SolverConfig] = None) -> IdempotentScan:
    """Exact route for exact 2D algebras, numeric multistart otherwise."""
    cfg = cfg or SolverConfig()
    if a.dim == 2 and a.mode == EXACT:
        return idempotents_2d_exact(a, cfg.tol)
    if a.dim == 1:
        return _idempotents_1d(a, cfg.tol)
    return idempotents_numeric(a, cfg)


def _idempotents_1d(a: Algebra, tol: float) -> IdempotentScan:
    c = a.gamma[0][0][0]
    points = [(c - c,)]  # typed zero
    if c != 0:
        points.append((1 / c,))
        return IdempotentScan(records=tuple(_record(a, p, tol)
                                            for p in _dedup_sorted(points, tol)),
                              method="exact" if a.mode == EXACT else "numeric",
                              at_infinity=2 - len(points))
    return IdempotentScan(records=tuple(_record(a, p, tol) for p in points),
                          method="exact" if a.mode == EXACT else "numeric",
                          at_infinity=1)


# -- nilpotent directions -------------------------------------------------------

def _square_as_ypoly(a: Algebra, k: int) -> list:
    g = a.gamma
    return polys.ypoly_trim([[0, 0, g[0][0][k]], [0, 2 * g[0][1][k]],
                             [g[1][1][k]]])


def _normalize_direction(v: Sequence, tol: float = 1e-6) -> Optional[tuple]:
    for lead in v:
        mag = abs(to_complex(lead))
        if mag > tol:
            return tuple(realify(x / lead, DEFAULT_TOL) for x in v)
    return None


def nilpotent_directions_2d_exact(a: Algebra, tol: float = DEFAULT_TOL) -> NilpotentScan:
    """Projective solutions of the homogeneous system x^2 = 0 over an exact
    2D algebra, via a gcd on the affine chart x1 = 1 plus the chart point
    (0, 1)."""
    u1 = polys.trim([polys.peval(c, Fraction(1)) for c in _reverse_chart(a, 0)])
    u2 = polys.trim([polys.peval(c, Fraction(1)) for c in _reverse_chart(a, 1)])
    if polys.is_zero(u1) and polys.is_zero(u2):
        return NilpotentScan(directions=(), continuum=True)
    directions = []
    roots = _fiber_roots(u1, u2, tol)
    for t in roots or []:
        cand = (Fraction(1) if is_exact(t) else 1.0, t)
        if _validate_nilpotent(a, cand, tol):
            directions.append(cand)
    e2 = (Fraction(0), Fraction(1))
    if _validate_nilpotent(a, e2, tol):
        directions.append(e2)
    directions = _dedup_sorted(directions, tol)
    return NilpotentScan(directions=tuple(
        NilpotentDirection(direction=tuple(d),
                           is_real=element_is_real(d, tol))
        for d in directions))


def _reverse_chart(a: Algebra, k: int) -> list:
    """Square-map component k as y-poly in x2 with Q[x1] coefficients."""
    return _square_as_ypoly(a, k)


def _validate_nilpotent(a: Algebra, v: Sequence, tol: float) -> bool:
    sq = a.square(v)
    if element_is_exact(sq):
        return all(c == 0 for c in sq)
    return element_norm(sq) <= tol * max(1.0, element_norm(v) ** 2)


def nilpotent_directions(a: Algebra, cfg: Optional[SolverConfig] = None) -> NilpotentScan:
    """Nonzero solutions of x^2 = 0 up to scale. Exact in 2D rational mode;
    multistart Gauss-Newton on affine charts otherwise (real and complex
    starts). Representatives carry first nonzero coordinate 1."""
    cfg = cfg or SolverConfig()
    if a.dim == 2 and a.mode == EXACT:
        return nilpotent_directions_2d_exact(a, cfg.tol)
    n = a.dim
    g = _gamma_array(a)
    rng = np.random.default_rng(cfg.seed + 1)
    found: list = []
    per_chart = 60
    for chart in range(n):
        if n == 1:
            candidates = [np.array([1.0 + 0j])]
        else:
            real = rng.normal(scale=1.0, size=(per_chart // 2, n - 1)).astype(complex)
            cplx = rng.normal(scale=1.0, size=(per_chart - per_chart // 2, n - 1)) + \
                1j * rng.normal(scale=1.0, size=(per_chart - per_chart // 2, n - 1))
            free = np.concatenate([real, cplx], axis=0)
            candidates = []
            for row in free:
                v = np.empty(n, dtype=complex)
                v[chart] = 1.0
                v[[i for i in range(n) if i != chart]] = row
                candidates.append(v)
        for v in candidates:
            v = _gauss_newton_nilpotent(g, v, chart, cfg)
            if v is None:
                continue
            sq = _batch_square(g, v[None, :])[0]
            if np.max(np.abs(sq)) <= 1e-10 * max(1.0, np.max(np.abs(v)) ** 2):
                norm = _normalize_direction([complex(c) for c in v])
                if norm is not None and any(abs(to_complex(c)) > 1e-8 for c in norm):
                    found.append(norm)
    found = _dedup_sorted(found, max(cfg.dedup, 1e-6))
    continuum = len(found) > 2 ** n
    return NilpotentScan(directions=tuple(
        NilpotentDirection(direction=tuple(d), is_real=element_is_real(d, cfg.tol))
        for d in found), continuum=continuum)


def _gauss_newton_nilpotent(g: np.ndarray, v: np.ndarray, chart: int,
                            cfg: SolverConfig) -> Optional[np.ndarray]:
    n = g.shape[0]
    free = [i for i in range(n) if i != chart]
    if not free:
        sq = _batch_square(g, v[None, :])[0]
        return v if np.max(np.abs(sq)) <= 1e-12 else None
    with np.errstate(all="ignore"):
        for _ in range(40):
            sq = _batch_square(g, v[None, :])[0]
            if not np.isfinite(sq).all():
                return None
            jac_full = 2.0 * _batch_mult_operator(g, v[None, :])[0]
            jac = jac_full[:, free]
            jh = jac.conj().T
            lhs = jh @ jac + 1e-14 * np.eye(len(free))
            rhs = jh @ sq
            try:
                step = np.linalg.solve(lhs, rhs)
            except np.linalg.LinAlgError:
                return None
            v = v.copy()
            v[free] -= step
            if np.max(np.abs(step)) <= 1e-14:
                break
    return v


# -- genericity -----------------------------------------------------------------

def half_in_spectra(records: Sequence[IdempotentRecord], tol: float) -> bool:
    half = Fraction(1, 2)
    return any(spectrum_contains(r.spectrum, half, tol) for r in records)


def genericity_verdict(a: Algebra, scan: IdempotentScan, nil: NilpotentScan,
                       tol: float = DEFAULT_TOL) -> GenericityVerdict:
    expected = 2 ** a.dim
    count = len(scan.records)
    half = half_in_spectra(scan.records, tol)
    continuum = scan.continuum or nil.continuum
    evidence = {
        "idempotents_found": count,
        "expected": expected,
        "half_in_spectrum": half,
        "nilpotent_directions": len(nil.directions),
        "nilpotent_continuum": nil.continuum,
        "continuum": continuum,
        "method": scan.method,
        "at_infinity": scan.at_infinity,
    }
    if scan.witness_line is not None:
        evidence["witness_line"] = scan.witness_line
    if half:
        status = GenericityStatus.NON_GENERIC_HALF_SPECTRUM
    elif continuum:
        status = GenericityStatus.NON_GENERIC_CONTINUUM
    elif count == expected:
        status = GenericityStatus.GENERIC
    elif count < expected and (len(nil.directions) > 0 or
                               (scan.method == "exact" and scan.at_infinity)):
        status = GenericityStatus.NON_GENERIC_MULTIPLE
    else:
        status = GenericityStatus.UNDETERMINED
    return GenericityVerdict(status=status, evidence=evidence)


def is_generic(a: Algebra, cfg: Optional[SolverConfig] = None) -> GenericityVerdict:
    """Combine the idempotent count against 2^n, the half-point test on all
    computed spectra, and the nilpotent scan into a verdict. Generic is
    never claimed without 2^n distinct witnesses."""
    cfg = cfg or SolverConfig()
    scan = solve_idempotents(a, cfg)
    nil = nilpotent_directions(a, cfg)
    return genericity_verdict(a, scan, nil, cfg.tol)


def is_real_generic(a: Algebra, cfg: Optional[SolverConfig] = None) -> tuple:
    """(bool or None, evidence): generic with every idempotent real.
    None propagates an Undetermined genericity verdict."""
    cfg = cfg or SolverConfig()
    scan = solve_idempotents(a, cfg)
    nil = nilpotent_directions(a, cfg)
    verdict = genericity_verdict(a, scan, nil, cfg.tol)
    evidence = dict(verdict.evidence)
    evidence["real_idempotents"] = sum(1 for r in scan.records if r.is_real)
    if verdict.status == GenericityStatus.UNDETERMINED:
        return None, evidence
    if verdict.status != GenericityStatus.GENERIC:
        return False, evidence
    return all(r.is_real for r in scan.records), evidence
