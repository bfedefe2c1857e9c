"""Parsing and serialization for algebras.

Two document formats:

* JSON: ``{"dim": n, "structure_constants": [[[...]]]}`` with gamma indexed
  [i][j][k] zero-based, or ``{"dim": n, "square_map": ["x1^2 - x2*x3", ...]}``.
  Rational values are written as ints or "p/q" strings; plain JSON floats
  switch the document to float mode.
* DSL: a comma-separated list of homogeneous degree-2 polynomials in
  variables x1..xn, with operators + - * ^ and rational literals like 2/3.
  Decimal literals switch the component to float mode.

Both round-trip exactly in rational mode.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .algebra import Algebra, AlgebraError
from .scalars import EXACT, FLOAT, infer_mode, is_exact


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class QuadraticMap:
    """Homogeneous degree-2 map stored per component as a symmetric
    coefficient matrix: F_k(x) = x^T Q_k x."""

    dim: int
    q: tuple  # tuple of dim symmetric matrices (row tuples)
    label: str = ""
    mode: str = EXACT

    def __post_init__(self):
        for mat in self.q:
            n = len(mat)
            if n != self.dim or any(len(r) != self.dim for r in mat):
                raise AlgebraError("component matrix has wrong shape")
            for i in range(n):
                for j in range(i + 1, n):
                    if mat[i][j] != mat[j][i]:
                        raise AlgebraError("component matrix not symmetric")

    def eval(self, x: Sequence) -> tuple:
        n = self.dim
        out = []
        for k in range(n):
            acc = 0
            for i in range(n):
                for j in range(n):
                    c = self.q[k][i][j]
                    if c != 0:
                        acc = acc + x[i] * x[j] * c
            out.append(acc)
        return tuple(out)


def from_quadratic_map(f: QuadraticMap) -> Algebra:
    """Polarize a square map into structure constants:
    gamma[i][j][k] = (Q_k)[i][j]."""
    n = f.dim
    gamma = [[[f.q[k][i][j] for k in range(n)] for j in range(n)]
             for i in range(n)]
    return Algebra.from_gamma(gamma, label=f.label, mode=f.mode)


def to_quadratic_map(a: Algebra) -> QuadraticMap:
    n = a.dim
    q = tuple(tuple(tuple(a.gamma[i][j][k] for j in range(n)) for i in range(n))
              for k in range(n))
    return QuadraticMap(dim=n, q=q, label=a.label, mode=a.mode)


# -- polynomial DSL -----------------------------------------------------------

_OPS = set("+-*^(),")


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.line, self.col)

    def _advance(self, k: int) -> None:
        for ch in self.text[self.pos:self.pos + k]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += k

    def tokens(self) -> list[tuple]:
        out = []
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self._advance(1)
                continue
            loc = (self.line, self.col)
            if ch in _OPS:
                out.append(("op", ch, loc))
                self._advance(1)
                continue
            if ch.isdigit() or ch == ".":
                j = self.pos
                seen_dot = False
                while j < len(text) and (text[j].isdigit() or text[j] == "."):
                    seen_dot = seen_dot or text[j] == "."
                    j += 1
                lit = text[self.pos:j]
                self._advance(j - self.pos)
                # a rational literal p/q: the slash binds to the number only
                # when both sides are integer literals
                if (not seen_dot and self.pos < len(text) and text[self.pos] == "/"
                        and self.pos + 1 < len(text) and text[self.pos + 1].isdigit()):
                    self._advance(1)
                    j = self.pos
                    while j < len(text) and text[j].isdigit():
                        j += 1
                    den = text[self.pos:j]
                    self._advance(j - self.pos)
                    out.append(("num", Fraction(int(lit), int(den)), loc))
                    continue
                if seen_dot:
                    if lit.count(".") > 1:
                        raise ParseError(f"malformed number {lit!r}", *loc)
                    out.append(("num", float(lit), loc))
                else:
                    out.append(("num", Fraction(int(lit)), loc))
                continue
            if ch == "x":
                j = self.pos + 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                if j == self.pos + 1:
                    raise ParseError("variable needs an index (x1, x2, ...)",
                                     *loc)
                idx = int(text[self.pos + 1:j])
                if idx < 1:
                    raise ParseError("variable indices start at 1", *loc)
                self._advance(j - self.pos)
                out.append(("var", idx - 1, loc))
                continue
            raise ParseError(f"unexpected character {ch!r}", *loc)
        out.append(("end", None, (self.line, self.col)))
        return out


class _PolyParser:
    """Recursive descent over monomial dictionaries {exponent-map: coeff}."""

    def __init__(self, tokens: list[tuple]):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_end_of_component(self) -> None:
        kind, val, loc = self.peek()
        if not (kind == "end" or (kind == "op" and val == ",")):
            raise ParseError(f"unexpected token {val!r}", *loc)

    def parse_component(self) -> dict:
        poly = self.parse_expr()
        self.expect_end_of_component()
        return poly

    def parse_expr(self) -> dict:
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        acc = self.parse_term()
        if negate:
            acc = _poly_scale(acc, -1)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                term = self.parse_term()
                if val == "-":
                    term = _poly_scale(term, -1)
                acc = _poly_add(acc, term)
            else:
                return acc

    def parse_term(self) -> dict:
        acc = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = _poly_mul(acc, self.parse_factor())
            else:
                return acc

    def parse_factor(self) -> dict:
        base = self.parse_atom()
        kind, val, loc = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, exp, eloc = self.take()
            if kind != "num" or not isinstance(exp, Fraction) or exp.denominator != 1 \
                    or exp < 0:
                raise ParseError("exponent must be a nonnegative integer", *eloc)
            out = {(): Fraction(1)}
            for _ in range(int(exp)):
                out = _poly_mul(out, base)
            return out
        return base

    def parse_atom(self) -> dict:
        kind, val, loc = self.take()
        if kind == "num":
            return {(): val}
        if kind == "var":
            return {((val, 1),): Fraction(1)}
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            kind, val, loc = self.take()
            if not (kind == "op" and val == ")"):
                raise ParseError("expected ')'", *loc)
            return inner
        if kind == "op" and val == "-":
            return _poly_scale(self.parse_atom(), -1)
        raise ParseError(f"unexpected token {val!r}", *loc)


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for mono, c in b.items():
        s = out.get(mono, 0) + c
        if s == 0:
            out.pop(mono, None)
        else:
            out[mono] = s
    return out


def _poly_scale(a: dict, s) -> dict:
    return {m: c * s for m, c in a.items()} if s != 0 else {}


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    exps: dict[int, int] = {}
    for var, e in m1 + m2:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, 0) + c1 * c2
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return out


def _mono_degree(mono: tuple) -> int:
    return sum(e for _, e in mono)


def _mono_str(mono: tuple) -> str:
    if not mono:
        return "1"
    return "*".join(f"x{v + 1}" if e == 1 else f"x{v + 1}^{e}" for v, e in mono)


def parse_square_map_dsl(text: str, label: str = "") -> QuadraticMap:
    """Parse a comma-separated list of homogeneous degree-2 polynomials.

    The number of components fixes the dimension; a variable index above it
    is a dimension mismatch. Every monomial must have total degree exactly 2.
    """
    toks = _Tokenizer(text).tokens()
    parser = _PolyParser(toks)
    components = []
    locs = []
    while True:
        locs.append(parser.peek()[2])
        components.append(parser.parse_component())
        kind, val, _ = parser.peek()
        if kind == "op" and val == ",":
            parser.take()
            continue
        break
    kind, val, loc = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {val!r}", *loc)
    n = len(components)
    if not 1 <= n <= 4:
        raise ParseError(f"supported dimensions are 1..4, got {n} components")
    mode = EXACT
    for idx, (poly, loc) in enumerate(zip(components, locs)):
        for mono, coeff in poly.items():
            d = _mono_degree(mono)
            if d != 2:
                raise ParseError(
                    f"component {idx + 1}: monomial '{_mono_str(mono)}' has "
                    f"degree {d}, expected homogeneous degree 2", *loc)
            for var, _ in mono:
                if var >= n:
                    raise ParseError(
                        f"component {idx + 1} uses x{var + 1} but only "
                        f"{n} components declare the dimension", *loc)
            if not is_exact(coeff):
                mode = FLOAT
    matrices = []
    for poly in components:
        mat = [[Fraction(0)] * n for _ in range(n)]
        for mono, coeff in poly.items():
            if len(mono) == 1:
                var, e = mono[0]
                if e == 2:
                    mat[var][var] = coeff
                    continue
            (v1, _), (v2, _) = mono
            half = coeff / 2
            mat[v1][v2] = mat[v1][v2] + half
            mat[v2][v1] = mat[v2][v1] + half
        if mode == FLOAT:
            mat = [[float(c) for c in row] for row in mat]
        matrices.append(tuple(tuple(row) for row in mat))
    return QuadraticMap(dim=n, q=tuple(matrices), label=label, mode=mode)


def render_square_map_dsl(f: QuadraticMap) -> str:
    """Inverse of parse_square_map_dsl, deterministic term order."""
    parts = []
    for k in range(f.dim):
        terms = []
        for i in range(f.dim):
            for j in range(i, f.dim):
                c = f.q[k][i][j] if i == j else f.q[k][i][j] * 2
                if c == 0:
                    continue
                mono = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
                terms.append((mono, c))
        if not terms:
            parts.append("0")
            continue
        buf = []
        for idx, (mono, c) in enumerate(terms):
            sign = "-" if _scalar_is_negative(c) else "+"
            mag = -c if _scalar_is_negative(c) else c
            coeff = "" if mag == 1 else f"{_scalar_str(mag)}*"
            if idx == 0:
                buf.append(f"-{coeff}{mono}" if sign == "-" else f"{coeff}{mono}")
            else:
                buf.append(f" {sign} {coeff}{mono}")
        parts.append("".join(buf))
    return ", ".join(parts)


def _scalar_is_negative(c) -> bool:
    try:
        return c < 0
    except TypeError:
        return False


def _scalar_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(c)


# -- JSON ---------------------------------------------------------------------

def scalar_to_json(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, (int, float)):
        return v
    raise TypeError(f"cannot serialize scalar {v!r}")


def scalar_from_json(v, where: str = "value"):
    if isinstance(v, bool):
        raise ParseError(f"{where}: booleans are not scalars")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad rational literal {v!r}") from exc
    raise ParseError(f"{where}: expected a number or 'p/q' string")


def serialize_algebra(a: Algebra) -> str:
    n = a.dim
    doc = {
        "dim": n,
        "scalar_mode": a.mode,
        "structure_constants": [[[scalar_to_json(a.gamma[i][j][k])
                                  for k in range(n)] for j in range(n)]
                                for i in range(n)],
    }
    if a.label:
        doc["label"] = a.label
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def serialize_quadratic_map(f: QuadraticMap, dsl: bool = False) -> str:
    if dsl:
        return render_square_map_dsl(f) + "\n"
    doc = {
        "dim": f.dim,
        "scalar_mode": f.mode,
        "square_map": [t for t in render_square_map_dsl(f).split(", ")],
    }
    if f.label:
        doc["label"] = f.label
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_json_document(text: str) -> Union[Algebra, QuadraticMap]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno)
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    if ("structure_constants" in doc) == ("square_map" in doc):
        raise ParseError(
            "document must carry exactly one of structure_constants/square_map")
    if "dim" not in doc or not isinstance(doc["dim"], int):
        raise ParseError("missing or non-integer 'dim'")
    n = doc["dim"]
    label = doc.get("label", "")
    mode_hint = doc.get("scalar_mode")
    if mode_hint not in (None, EXACT, FLOAT):
        raise ParseError(f"unknown scalar_mode {mode_hint!r}")
    if "square_map" in doc:
        comps = doc["square_map"]
        if not isinstance(comps, list) or not all(isinstance(c, str) for c in comps):
            raise ParseError("'square_map' must be a list of strings")
        if len(comps) != n:
            raise ParseError(f"declared dim {n} but {len(comps)} components")
        f = parse_square_map_dsl(", ".join(comps), label=label)
        if mode_hint == FLOAT and f.mode == EXACT:
            f = QuadraticMap(dim=f.dim,
                             q=tuple(tuple(tuple(float(c) for c in row)
                                           for row in mat) for mat in f.q),
                             label=f.label, mode=FLOAT)
        return f
    raw = doc["structure_constants"]
    try:
        gamma = [[[scalar_from_json(raw[i][j][k], f"gamma[{i}][{j}][{k}]")
                   for k in range(n)] for j in range(n)] for i in range(n)]
    except (IndexError, TypeError) as exc:
        raise ParseError("structure_constants must be an n x n x n array") from exc
    mode = mode_hint
    if mode is None:
        mode = infer_mode([gamma[i][j][k] for i in range(n) for j in range(n)
                           for k in range(n)])
    if mode == FLOAT:
        gamma = [[[float(v) for v in row] for row in plane] for plane in gamma]
    try:
        return Algebra.from_gamma(gamma, label=label, mode=mode)
    except AlgebraError as exc:
        raise ParseError(str(exc))


def parse_document(text: str, as_map: bool = False) -> Union[Algebra, QuadraticMap]:
    """Parse a JSON or DSL document into an Algebra (default) or, with
    as_map=True, into the raw QuadraticMap."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = parse_json_document(text)
    else:
        obj = parse_square_map_dsl(text)
    if as_map:
        return obj if isinstance(obj, QuadraticMap) else to_quadratic_map(obj)
    return from_quadratic_map(obj) if isinstance(obj, QuadraticMap) else obj
