"""Classification pipeline for 2D real generic algebras, the syzygy and
square-identity checkers, and the affine-geometry scans (plane bound and
the 2^k conjecture scan in dimension 3).

Conventions fixed here once and used everywhere:

* type labels come from the unordered charge signs, with a_i = 1/(1 - 2 l_i):
  all positive -> TypeI, exactly one positive -> TypeII, exactly two
  positive -> TypeIII; the all-negative pattern cannot occur because the
  charges sum to 1;
* the third eigenvalue solves the spectral identity
  4 l1 l2 l3 - l1 - l2 - l3 + 1 = 0 directly, i.e.
  l3 = (l1 + l2 - 1) / (4 l1 l2 - 1), equivalently
  l3 - 1/2 = -(2 l1 - 1)(2 l2 - 1) / (2 (4 l1 l2 - 1));
* a charge or chi value within 1e-7 of zero is a stratum boundary; no type
  is emitted there.
"""
from __future__ import annotations

import enum
import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .algebra import (Algebra, element_is_exact, element_norm, element_scale,
                      element_sub, elements_close, spectrum_contains)
from .io import scalar_to_json
from .scalars import DEFAULT_TOL, EXACT, QC, is_exact, realify, to_complex
from .solve import (GenericityStatus, GenericityVerdict, IdempotentRecord,
                    IdempotentScan, NilpotentScan, SolverConfig,
                    genericity_verdict, nilpotent_directions,
                    solve_idempotents)

BOUNDARY_TOL = 1e-7

TYPE_CONVENTION = ("charge signs (+,+,+) -> TypeI, one positive -> TypeII, "
                   "two positive -> TypeIII")


class ConfigType(str, enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    TYPE_III = "TypeIII"
    NOT_APPLICABLE = "NotApplicable"


class LineCase(str, enum.Enum):
    CASE_A = "CaseA"  # the whole line consists of idempotents
    CASE_B = "CaseB"  # only the two given idempotents lie on the line


class BoundaryError(ValueError):
    """A charge or chi value sits on the genericity boundary."""


class RelationPreconditionError(ValueError):
    """The affine-relation preconditions of the square identity fail."""


@dataclass(frozen=True)
class SyzygyResiduals:
    spectral: object
    charge_sum: object
    barycentric: tuple


@dataclass(frozen=True)
class AffinePlane:
    base: tuple
    spanning: tuple  # tuple of independent direction vectors


@dataclass(frozen=True)
class PlaneCount:
    count: int
    members: tuple  # indices into the supplied idempotent list
    theorem_violation: bool
    conjecture_violation: bool


@dataclass(frozen=True)
class ScanReport:
    planes_scanned: int
    max_count: int
    max_plane: Optional[AffinePlane]
    violations: tuple
    skipped_degenerate: int


@dataclass(frozen=True)
class AlgebraReport:
    algebra: Algebra
    idempotents: tuple  # zero idempotent first, the rest sorted
    nilpotents: tuple
    verdict: GenericityVerdict
    sigma: tuple  # union Peirce spectrum over nonzero idempotents
    real_generic: Optional[bool]
    config_type: ConfigType
    index_at_infinity: Optional[int]
    index_sum_total: Optional[int]
    syzygy_residuals: Optional[SyzygyResiduals]
    boundary: bool
    notes: tuple


# -- scalar-level checkers ------------------------------------------------------

def verify_spectral_syzygy(l1, l2, l3):
    """Residual of 4 l1 l2 l3 - l1 - l2 - l3 + 1; zero iff the spectrum
    triple is admissible."""
    return 4 * l1 * l2 * l3 - l1 - l2 - l3 + 1


def charge(lam):
    """a = 1/(1 - 2 lambda), the barycentric weight carried by an
    idempotent with nontrivial Peirce eigenvalue lambda."""
    d = 1 - 2 * lam
    if d == 0:
        raise BoundaryError("eigenvalue 1/2 has no charge")
    return (Fraction(1) / d) if is_exact(d) else 1.0 / d


def verify_charge_syzygy(l1, l2, l3):
    """Residual of a1 + a2 + a3 - 1; requires every eigenvalue != 1/2."""
    return charge(l1) + charge(l2) + charge(l3) - 1


def third_eigenvalue(li, lj):
    """The unique third eigenvalue completing an admissible spectrum.

    Solves the spectral identity for the remaining unknown; the quotient
    form is (li + lj - 1) / (4 li lj - 1), whose half-shifted version is
    -(2li - 1)(2lj - 1) / (2 (4 li lj - 1))."""
    den = 4 * li * lj - 1
    if den == 0:
        raise BoundaryError("4*l1*l2 = 1 leaves the third eigenvalue free "
                            "or empty")
    num = li + lj - 1
    return (Fraction(num) / den) if is_exact(num) and is_exact(den) else num / den


def classify_type(charges_triple: Sequence, tol: float = BOUNDARY_TOL) -> ConfigType:
    """Unordered sign pattern of the three charges; refuses boundaries."""
    signs = []
    for a in charges_triple:
        if is_exact(a):
            if a == 0:
                raise BoundaryError("zero charge is a stratum boundary")
            signs.append(1 if a > 0 else -1)
        else:
            z = to_complex(a)
            if abs(z.imag) > tol or abs(z.real) <= tol:
                raise BoundaryError(f"charge {a!r} too close to the boundary")
            signs.append(1 if z.real > 0 else -1)
    pos = signs.count(1)
    if pos == 3:
        return ConfigType.TYPE_I
    if pos == 1:
        return ConfigType.TYPE_II
    if pos == 2:
        return ConfigType.TYPE_III
    raise BoundaryError("all-negative charges violate the charge sum; "
                        "inconsistent input")


# -- report-level operations ------------------------------------------------------

def _nonzero_records(report_or_records) -> list:
    records = report_or_records.idempotents \
        if isinstance(report_or_records, AlgebraReport) else report_or_records
    return [r for r in records if not r.is_zero]


def _require_2d_real_generic(report: AlgebraReport) -> list:
    if report.algebra.dim != 2:
        raise ValueError("operation requires a 2-dimensional algebra")
    if report.verdict.status != GenericityStatus.GENERIC or not report.real_generic:
        raise ValueError("operation requires a real generic algebra")
    nz = _nonzero_records(report)
    if len(nz) != 3:
        raise ValueError("expected exactly three nonzero idempotents")
    return nz


def charges(report: AlgebraReport) -> tuple:
    """(a1, a2, a3) for the three nonzero idempotents, a0 = -1 implied.
    Computed from chi at 1/2, so no eigenvalue extraction is involved."""
    nz = _require_2d_real_generic(report)
    out = []
    for r in nz:
        chi = r.chi_half
        if is_exact(chi):
            if chi == 0:
                raise BoundaryError("chi(1/2) = 0 on a generic record")
            out.append(Fraction(-1, 4) / chi)
        else:
            z = to_complex(chi)
            if abs(z.real) <= BOUNDARY_TOL / 4:
                raise BoundaryError("chi(1/2) within boundary tolerance")
            out.append(-0.25 / z.real)
    return tuple(out)


def nontrivial_eigenvalues(report: AlgebraReport) -> tuple:
    """(l1, l2, l3) recovered from chi(1/2) = (2 lambda - 1)/4, which stays
    exact even when idempotent coordinates are irrational."""
    nz = _require_2d_real_generic(report)
    out = []
    for r in nz:
        chi = r.chi_half
        lam = 2 * chi + Fraction(1, 2) if is_exact(chi) else 2 * to_complex(chi).real + 0.5
        out.append(lam)
    return tuple(out)


def verify_barycentric(report: AlgebraReport) -> tuple:
    """Vector residual of sum_i c_i / chi_i(1/2); zero for generic input."""
    nz = _require_2d_real_generic(report)
    acc = None
    for r in nz:
        chi = r.chi_half
        if not is_exact(chi):
            chi = to_complex(chi).real
        term = tuple(v / chi for v in r.point)
        acc = term if acc is None else tuple(a + b for a, b in zip(acc, term))
    return acc


def classify_type_geometric(report: AlgebraReport,
                            tol: float = BOUNDARY_TOL) -> ConfigType:
    """Type from the barycentric coordinates of the zero idempotent with
    respect to the triangle of nonzero ones, using coordinates only."""
    nz = _require_2d_real_generic(report)
    pts = [r.point for r in nz]
    m = [[pts[0][0], pts[1][0], pts[2][0]],
         [pts[0][1], pts[1][1], pts[2][1]],
         [1, 1, 1]]
    try:
        bary = linalg.solve(m, [0, 0, 1])
    except linalg.SingularMatrixError:
        raise BoundaryError("collinear idempotents: inconsistent with a "
                            "generic algebra")
    return classify_type(tuple(bary), tol)


def index(a: Algebra, c: Sequence) -> int:
    """Topological index of the fixed-point field at an idempotent:
    the sign of chi(1/2)."""
    chi = a.chi_at_half(c)
    if is_exact(chi):
        if chi == 0:
            raise BoundaryError("chi(1/2) = 0: index undefined")
        return 1 if chi > 0 else -1
    z = to_complex(chi)
    if abs(z.real) <= BOUNDARY_TOL:
        raise BoundaryError("chi(1/2) within boundary tolerance")
    return 1 if z.real > 0 else -1


def index_at_infinity(report: AlgebraReport) -> int:
    """Minus the index sum over the three nonzero idempotents."""
    nz = _require_2d_real_generic(report)
    if any(r.index is None for r in nz):
        raise BoundaryError("an index is undefined on this report")
    return -sum(r.index for r in nz)


def square_identity_residual(a: Algebra, cs: Sequence, alphas: Sequence,
                             tol: float = DEFAULT_TOL) -> tuple:
    """Residual of sum_{i<j} alpha_i alpha_j (c_i - c_j)^2 for idempotents
    satisfying c_last = sum alpha_i c_i with sum alpha_i = 1.

    Precondition violations raise RelationPreconditionError; they are not
    reported as a nonzero residual.
    """
    cs = [tuple(c) for c in cs]
    alphas = list(alphas)
    if len(cs) != len(alphas) + 1:
        raise RelationPreconditionError(
            "need k coefficients for k+1 idempotents")
    s = sum(alphas)
    if is_exact(s) and all(is_exact(x) for x in alphas):
        if s != 1:
            raise RelationPreconditionError("coefficients must sum to 1")
    elif abs(to_complex(s) - 1) > tol:
        raise RelationPreconditionError("coefficients must sum to 1")
    combo = None
    for alpha, c in zip(alphas, cs[:-1]):
        term = element_scale(c, alpha)
        combo = term if combo is None else tuple(u + v for u, v in zip(combo, term))
    if not elements_close(combo, cs[-1], tol):
        raise RelationPreconditionError(
            "the last idempotent is not the stated affine combination")
    for c in cs:
        psi = a.psi(c)
        if element_is_exact(psi):
            if any(v != 0 for v in psi):
                raise RelationPreconditionError(f"{c} is not an idempotent")
        elif element_norm(psi) > tol * max(1.0, element_norm(c) ** 2):
            raise RelationPreconditionError(f"{c} is not an idempotent")
    acc = tuple(0 for _ in range(a.dim))
    for i in range(len(alphas)):
        for j in range(i + 1, len(alphas)):
            d = element_sub(cs[i], cs[j])
            term = element_scale(a.square(d), alphas[i] * alphas[j])
            acc = tuple(u + v for u, v in zip(acc, term))
    return acc


@dataclass(frozen=True)
class LineAnalysis:
    case: LineCase
    witnesses: dict


def line_analysis(a: Algebra, c1: Sequence, c2: Sequence,
                  tol: float = DEFAULT_TOL) -> LineAnalysis:
    """Decide whether the line through two idempotents consists entirely of
    idempotents (CaseA) or carries only the two (CaseB): one extra sample
    point on the line is decisive."""
    for c in (c1, c2):
        psi = a.psi(c)
        if element_is_exact(psi):
            if any(v != 0 for v in psi):
                raise ValueError(f"{tuple(c)} is not an idempotent")
        elif element_norm(psi) > tol * max(1.0, element_norm(c) ** 2):
            raise ValueError(f"{tuple(c)} is not an idempotent")
    if elements_close(c1, c2, tol):
        raise ValueError("need two distinct idempotents")
    for alpha in (2, -1):
        sample = tuple(alpha * u + (1 - alpha) * v for u, v in zip(c1, c2))
        if not (elements_close(sample, c1, tol) or elements_close(sample, c2, tol)):
            break
    psi = a.psi(sample)
    exact = element_is_exact(psi)
    on_line = all(v == 0 for v in psi) if exact \
        else element_norm(psi) <= tol * max(1.0, element_norm(sample) ** 2)
    if not on_line:
        return LineAnalysis(case=LineCase.CASE_B,
                            witnesses={"sample": sample, "sample_alpha": alpha})
    diff = element_sub(c1, c2)
    diff_sq = a.square(diff)
    spec = a.peirce_spectrum(sample)
    return LineAnalysis(case=LineCase.CASE_A, witnesses={
        "sample": sample,
        "sample_alpha": alpha,
        "difference_square": diff_sq,
        "difference_is_nilpotent": all(v == 0 for v in diff_sq)
        if element_is_exact(diff_sq) else element_norm(diff_sq) <= tol,
        "half_in_sample_spectrum": spectrum_contains(spec, Fraction(1, 2), tol),
    })


# -- affine subspace scans ---------------------------------------------------------

def point_in_affine_subspace(point: Sequence, plane: AffinePlane,
                             tol: float = DEFAULT_TOL) -> bool:
    diff = element_sub(point, plane.base)
    n = len(diff)
    k = len(plane.spanning)
    cols = [list(s) for s in plane.spanning]
    exact = element_is_exact(diff) and all(element_is_exact(s)
                                           for s in plane.spanning)
    if exact:
        m = [[cols[j][i] for j in range(k)] for i in range(n)]
        aug_rank = linalg.rank([row + [diff[i]] for i, row in enumerate(m)])
        return aug_rank == linalg.rank(m)
    a = np.array([[to_complex(cols[j][i]) for j in range(k)]
                  for i in range(n)], dtype=complex)
    b = np.array([to_complex(v) for v in diff], dtype=complex)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = np.linalg.norm(a @ sol - b)
    return res <= tol * max(1.0, float(np.linalg.norm(b)))


def count_idempotents_in_affine_subspace(records_or_report, plane: AffinePlane,
                                         generic: bool = True,
                                         tol: float = DEFAULT_TOL) -> PlaneCount:
    """Count idempotents lying in an affine subspace (zero included) and
    check the dimension-2 bound of 4 and the general 2^k bound."""
    records = records_or_report.idempotents \
        if isinstance(records_or_report, AlgebraReport) else records_or_report
    k = len(plane.spanning)
    members = tuple(i for i, r in enumerate(records)
                    if point_in_affine_subspace(r.point, plane, tol))
    count = len(members)
    return PlaneCount(count=count, members=members,
                      theorem_violation=generic and k == 2 and count > 4,
                      conjecture_violation=count > 2 ** k)


def _plane_through(points: Sequence) -> Optional[AffinePlane]:
    base = points[0]
    spans = [element_sub(p, base) for p in points[1:]]
    m = [list(s) for s in spans]
    tol = 0.0 if all(element_is_exact(s) for s in spans) else 1e-12
    if linalg.rank(m, tol) < len(spans):
        return None
    return AffinePlane(base=tuple(base), spanning=tuple(tuple(s) for s in spans))


def conjecture_scan(a: Algebra, planes: int = 0, seed: int = 0,
                    cfg: Optional[SolverConfig] = None,
                    points: Optional[Sequence] = None,
                    generic: bool = True,
                    tol: float = DEFAULT_TOL) -> ScanReport:
    """Scan 2-dimensional affine subspaces of a 3-dimensional algebra for
    idempotent counts: all planes through idempotent triples, plus a seeded
    batch of random rational planes. Counts above 4 are violations."""
    if a.dim != 3:
        raise ValueError("the conjecture scan runs on 3-dimensional algebras")
    if points is None:
        scan = solve_idempotents(a, cfg or SolverConfig())
        points = [r.point for r in scan.records]
    records = [IdempotentRecord(point=tuple(p), spectrum=(), chi_half=None,
                                charge=None, index=None, is_real=True)
               for p in points]
    max_count, max_plane = 0, None
    violations = []
    skipped = 0
    scanned = 0
    for triple in itertools.combinations(range(len(points)), 3):
        plane = _plane_through([points[i] for i in triple])
        if plane is None:
            skipped += 1
            continue
        scanned += 1
        pc = count_idempotents_in_affine_subspace(records, plane, generic, tol)
        if pc.count > max_count:
            max_count, max_plane = pc.count, plane
        if pc.count > 4:
            violations.append((plane, pc.count))
    rng = random.Random(seed)
    for _ in range(planes):
        base = tuple(Fraction(rng.randint(-8, 8), rng.randint(1, 4))
                     for _ in range(3))
        while True:
            s1 = tuple(Fraction(rng.randint(-4, 4)) for _ in range(3))
            s2 = tuple(Fraction(rng.randint(-4, 4)) for _ in range(3))
            if linalg.rank([list(s1), list(s2)]) == 2:
                break
        plane = AffinePlane(base=base, spanning=(s1, s2))
        scanned += 1
        pc = count_idempotents_in_affine_subspace(records, plane, generic, tol)
        if pc.count > max_count:
            max_count, max_plane = pc.count, plane
        if pc.count > 4:
            violations.append((plane, pc.count))
    return ScanReport(planes_scanned=scanned, max_count=max_count,
                      max_plane=max_plane, violations=tuple(violations),
                      skipped_degenerate=skipped)


# -- the full report ----------------------------------------------------------------

def _ordered_records(records: Sequence[IdempotentRecord]) -> tuple:
    zero = [r for r in records if r.is_zero]
    rest = [r for r in records if not r.is_zero]
    return tuple(zero + rest)


def _union_spectrum(records: Sequence[IdempotentRecord], tol: float) -> tuple:
    out: list = []
    for r in records:
        if r.is_zero:
            continue
        for mu in r.spectrum:
            if not any((is_exact(mu) and is_exact(v) and mu == v) or
                       abs(to_complex(mu) - to_complex(v)) <= tol
                       for v in out):
                out.append(mu)
    return tuple(sorted(out, key=lambda v: (to_complex(v).real,
                                            to_complex(v).imag)))


def analyze(a: Algebra, cfg: Optional[SolverConfig] = None) -> AlgebraReport:
    """Full analysis: idempotents, nilpotents, genericity, union spectrum,
    and, for 2D real generic algebras, charges, type, indices and the three
    syzygy residuals."""
    cfg = cfg or SolverConfig()
    scan = solve_idempotents(a, cfg)
    nil = nilpotent_directions(a, cfg)
    verdict = genericity_verdict(a, scan, nil, cfg.tol)
    records = _ordered_records(scan.records)
    sigma = _union_spectrum(records, cfg.tol)
    real_generic: Optional[bool]
    if verdict.status == GenericityStatus.UNDETERMINED:
        real_generic = None
    elif verdict.status != GenericityStatus.GENERIC:
        real_generic = False
    else:
        real_generic = all(r.is_real for r in scan.records)
    config_type = ConfigType.NOT_APPLICABLE
    ind_inf = None
    ind_total = None
    residuals = None
    boundary = False
    notes = [f"type convention: {TYPE_CONVENTION}"]
    if a.dim == 2 and verdict.status == GenericityStatus.GENERIC \
            and real_generic and len(records) == 4:
        report = AlgebraReport(algebra=a, idempotents=records, nilpotents=nil.directions,
                               verdict=verdict, sigma=sigma, real_generic=real_generic,
                               config_type=ConfigType.NOT_APPLICABLE,
                               index_at_infinity=None, index_sum_total=None,
                               syzygy_residuals=None, boundary=False, notes=())
        try:
            ch = charges(report)
            t_charge = classify_type(ch)
            t_geom = classify_type_geometric(report)
            if t_charge != t_geom:
                raise AssertionError(
                    f"classification mismatch: charges say {t_charge}, "
                    f"geometry says {t_geom}")
            config_type = t_charge
            ind_inf = index_at_infinity(report)
            ind_total = sum(r.index for r in records if r.index is not None)
            lams = nontrivial_eigenvalues(report)
            residuals = SyzygyResiduals(
                spectral=verify_spectral_syzygy(*lams),
                charge_sum=sum(ch) - 1,
                barycentric=verify_barycentric(report),
            )
        except BoundaryError as exc:
            boundary = True
            notes.append(f"boundary: {exc}")
    return AlgebraReport(algebra=a, idempotents=records,
                         nilpotents=nil.directions, verdict=verdict,
                         sigma=sigma, real_generic=real_generic,
                         config_type=config_type, index_at_infinity=ind_inf,
                         index_sum_total=ind_total,
                         syzygy_residuals=residuals, boundary=boundary,
                         notes=tuple(notes))


# -- serialization -------------------------------------------------------------------

def _scalar_json(v):
    v = realify(v, DEFAULT_TOL) if not is_exact(v) else v
    if isinstance(v, QC):
        return {"re": scalar_to_json(v.re), "im": scalar_to_json(v.im)}
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return scalar_to_json(v)


def _element_json(x) -> list:
    return [_scalar_json(v) for v in x]


def report_to_dict(report: AlgebraReport) -> dict:
    d = {
        "dim": report.algebra.dim,
        "label": report.algebra.label,
        "scalar_mode": report.algebra.mode,
        "idempotents": [
            {
                "point": _element_json(r.point),
                "point_decimal": [[to_complex(v).real, to_complex(v).imag]
                                  for v in r.point],
                "spectrum": _element_json(r.spectrum),
                "chi_half": _scalar_json(r.chi_half),
                "charge": None if r.charge is None else _scalar_json(r.charge),
                "index": r.index,
                "is_real": r.is_real,
            }
            for r in report.idempotents
        ],
        "nilpotents": [
            {"direction": _element_json(n.direction), "is_real": n.is_real}
            for n in report.nilpotents
        ],
        "verdict": {
            "status": report.verdict.status.value,
            "evidence": _evidence_json(report.verdict.evidence),
        },
        "sigma": _element_json(report.sigma),
        "real_generic": report.real_generic,
        "config_type": report.config_type.value,
        "index_at_infinity": report.index_at_infinity,
        "index_sum_total": report.index_sum_total,
        "syzygy_residuals": None if report.syzygy_residuals is None else {
            "spectral": _scalar_json(report.syzygy_residuals.spectral),
            "charge_sum": _scalar_json(report.syzygy_residuals.charge_sum),
            "barycentric": _element_json(report.syzygy_residuals.barycentric),
        },
        "boundary": report.boundary,
        "notes": list(report.notes),
    }
    return d


def _evidence_json(evidence: dict) -> dict:
    out = {}
    for k, v in evidence.items():
        if isinstance(v, tuple):
            out[k] = [_element_json(x) if isinstance(x, tuple) else _scalar_json(x)
                      for x in v]
        elif isinstance(v, (bool, int, str)) or v is None:
            out[k] = v
        else:
            out[k] = _scalar_json(v)
    return out


def report_to_json(report: AlgebraReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"
