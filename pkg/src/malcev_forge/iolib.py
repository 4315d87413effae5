"""Reading and writing algebra description documents (format version 1).

The grammar is documented in ``docs/FORMAT.md``. In short::

    format_version: 1
    name: sl2
    field: Q
    grading: trivial
    bcommutative: true

    [basis]
    h 0
    e 0
    f 0

    [products]
    h * e = 2 e
    e * f = 1 h

    [form]
    2 0 0
    0 0 1
    0 1 0

    [toral]
    1 0 0
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import AlgebraError, StructureAlgebra
from .grading import GradingGroup
from .toral import NotToral, ToralPair

FORMAT_VERSION = "1"
_HEADER_KEYS = ("format_version", "name", "description", "field", "grading", "bcommutative")
_SECTIONS = ("basis", "products", "form", "toral")
_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def parse_rational(text: str, line: Optional[int] = None) -> Fraction:
    text = text.strip()
    if not _RAT.match(text):
        raise ParseError(f"bad rational {text!r} (expected p or p/q)", line)
    if "/" in text and int(text.split("/")[1]) == 0:
        raise ParseError("zero denominator", line)
    return Fraction(text)


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_algebra(text: str) -> Tuple[StructureAlgebra, Optional[ToralPair]]:
    header: Dict[str, Tuple[str, int]] = {}
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip()
            if current not in _SECTIONS:
                raise ParseError(f"unknown section [{current}]", lineno)
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", lineno)
            sections[current] = []
            continue
        if current is None:
            key, sep, value = line.partition(":")
            key = key.strip()
            if not sep:
                raise ParseError(f"expected 'key: value', got {line!r}", lineno)
            if key not in _HEADER_KEYS:
                raise ParseError(f"unknown header key {key!r}", lineno)
            if key in header:
                raise ParseError(f"duplicate header key {key!r}", lineno)
            header[key] = (value.strip(), lineno)
        else:
            sections[current].append((lineno, line))

    version = header.get("format_version", (None, None))[0]
    if version != FORMAT_VERSION:
        raise ParseError(f"format_version must be {FORMAT_VERSION!r}, got {version!r}")
    fld, fl = header.get("field", ("Q", None))
    if fld != "Q":
        raise ParseError(f"field must be Q, got {fld!r}", fl)
    gtext, gl = header.get("grading", ("trivial", None))
    try:
        grading = GradingGroup.parse(gtext)
    except ValueError as exc:
        raise ParseError(str(exc), gl) from None
    btext, bl = header.get("bcommutative", ("false", None))
    if btext not in ("true", "false"):
        raise ParseError(f"bcommutative must be true or false, got {btext!r}", bl)
    bcomm = btext == "true"

    if "basis" not in sections or not sections["basis"]:
        raise ParseError("missing or empty [basis] section")
    names: List[str] = []
    degrees: List[int] = []
    for lineno, line in sections["basis"]:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"basis line must be 'name degree', got {line!r}", lineno)
        nm, deg = parts
        if not _NAME.match(nm):
            raise ParseError(f"bad basis name {nm!r}", lineno)
        if nm in names:
            raise ParseError(f"duplicate basis name {nm!r}", lineno)
        try:
            d = grading.check(int(deg))
        except ValueError:
            raise ParseError(f"degree {deg!r} not in grading {grading.name}", lineno) from None
        names.append(nm)
        degrees.append(d)

    products: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    for lineno, line in sections.get("products", []):
        lhs, sep, rhs = line.partition("=")
        factors = [p.strip() for p in lhs.split("*")]
        if not sep or len(factors) != 2:
            raise ParseError(f"product line must be 'a * b = c x, ...', got {line!r}", lineno)
        a, b = factors
        for nm in (a, b):
            if nm not in names:
                raise ParseError(f"undeclared basis name {nm!r}", lineno)
        if (a, b) in products:
            raise ParseError(f"product {a} * {b} given twice", lineno)
        if bcomm and (b, a) in products:
            raise ParseError(f"bcommutative document gives both {b} * {a} and {a} * {b}", lineno)
        result: Dict[str, Fraction] = {}
        rhs = rhs.strip()
        if rhs != "0":
            for term in rhs.split(","):
                tp = term.split()
                if len(tp) != 2:
                    raise ParseError(f"term must be 'coeff name', got {term.strip()!r}", lineno)
                c = parse_rational(tp[0], lineno)
                if tp[1] not in names:
                    raise ParseError(f"undeclared basis name {tp[1]!r}", lineno)
                if tp[1] in result:
                    raise ParseError(f"basis name {tp[1]!r} repeated in result", lineno)
                result[tp[1]] = c
        products[(a, b)] = result

    gram = None
    if "form" in sections:
        rows = sections["form"]
        if len(rows) != len(names):
            raise ParseError(f"[form] needs {len(names)} rows, got {len(rows)}", rows[0][0] if rows else None)
        gram = []
        for lineno, line in rows:
            entries = line.split()
            if len(entries) != len(names):
                raise ParseError(f"form row needs {len(names)} entries", lineno)
            gram.append([parse_rational(x, lineno) for x in entries])

    try:
        alg = StructureAlgebra.from_table(
            grading, names, degrees, products, gram=gram, bcommutative=bcomm,
            name=header.get("name", ("", None))[0],
            description=header.get("description", ("", None))[0],
        )
    except AlgebraError as exc:
        raise ParseError(f"invalid algebra: {exc}") from None

    pair = None
    if "toral" in sections:
        vecs = []
        for lineno, line in sections["toral"]:
            entries = line.split()
            if len(entries) != len(names):
                raise ParseError(f"toral vector needs {len(names)} entries", lineno)
            vecs.append(alg.elem([parse_rational(x, lineno) for x in entries]))
        try:
            pair = ToralPair(alg, vecs)
        except NotToral as exc:
            raise ParseError(f"invalid toral subalgebra: {exc}", sections["toral"][0][0]) from None
    return alg, pair


def _is_bcommutative(alg: StructureAlgebra) -> bool:
    return alg.bcommutativity_witness() is None


def serialize_algebra(alg: StructureAlgebra, pair: Optional[ToralPair] = None) -> str:
    bcomm = _is_bcommutative(alg)
    out = [f"format_version: {FORMAT_VERSION}"]
    if alg.name:
        out.append(f"name: {alg.name}")
    if alg.description:
        out.append(f"description: {' '.join(alg.description.split())}")
    out += ["field: Q", f"grading: {alg.grading.name}", f"bcommutative: {'true' if bcomm else 'false'}", ""]
    out.append("[basis]")
    out += [f"{nm} {d}" for nm, d in zip(alg.basis, alg.degrees)]
    out += ["", "[products]"]
    for (i, j) in sorted(alg.sc):
        if bcomm and j < i:
            continue
        terms = ", ".join(f"{format_rational(c)} {alg.basis[k]}" for k, c in sorted(alg.sc[(i, j)].items()))
        out.append(f"{alg.basis[i]} * {alg.basis[j]} = {terms}")
    if alg.gram is not None:
        out += ["", "[form]"]
        out += [" ".join(format_rational(x) for x in row) for row in alg.gram]
    if pair is not None:
        out += ["", "[toral]"]
        out += [" ".join(format_rational(x) for x in h.dense()) for h in pair.h_basis]
    return "\n".join(out) + "\n"


def load(path_or_builtin: str) -> Tuple[StructureAlgebra, Optional[ToralPair]]:
    """Load ``builtin:NAME`` or a document from a file path."""
    if path_or_builtin.startswith("builtin:"):
        from .catalog import builtin

        return builtin(path_or_builtin[len("builtin:"):])
    with open(path_or_builtin, encoding="utf-8") as fh:
        return parse_algebra(fh.read())
