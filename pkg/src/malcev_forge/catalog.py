"""Built-in example algebras, stored as format-1 documents."""

from __future__ import annotations

from typing import Dict, Optional, Tuple

from .algebra import StructureAlgebra
from .toral import ToralPair

_M7_TABLE = """\
[basis]
e1 0
e2 0
e3 0
e4 0
e5 0
e6 0
e7 0

[products]
e1 * e2 = 2 e2
e1 * e3 = 2 e3
e1 * e4 = 2 e4
e1 * e5 = -2 e5
e1 * e6 = -2 e6
e1 * e7 = -2 e7
e2 * e3 = 2 e7
e2 * e4 = -2 e6
e2 * e5 = 1 e1
e2 * e6 = 0
e2 * e7 = 0
e3 * e4 = 2 e5
e3 * e5 = 0
e3 * e6 = 1 e1
e3 * e7 = 0
e4 * e5 = 0
e4 * e6 = 0
e4 * e7 = 1 e1
e5 * e6 = -2 e4
e5 * e7 = 2 e3
e6 * e7 = -2 e2
"""

_M7_FORM = """\
[form]
{e11} 0 0 0 0 0 0
0 0 0 0 1 0 0
0 0 0 0 0 1 0
0 0 0 0 0 0 1
0 1 0 0 0 0 0
0 0 1 0 0 0 0
0 0 0 1 0 0 0

[toral]
1 0 0 0 0 0 0
"""

_DOCS: Dict[str, str] = {
    "m7-paper": (
        "format_version: 1\n"
        "name: m7-paper\n"
        "description: Seven-dimensional non-Lie Malcev algebra (traceless octonions, minus product) "
        "with the Gram matrix exactly as printed, (e1,e1) = 1. This form is not invariant: "
        "(e1e2,e5) = 2 but (e1,e2e5) = 1.\n"
        "field: Q\ngrading: trivial\nbcommutative: true\n\n"
        + _M7_TABLE + "\n" + _M7_FORM.format(e11=1)
    ),
    "m7": (
        "format_version: 1\n"
        "name: m7\n"
        "description: Seven-dimensional non-Lie Malcev algebra with invariant form. Differs from m7-paper "
        "only in (e1,e1) = 2: invariance on (e1,e2,e5) forces (e1,e1) = 2 (e2,e5) = 2.\n"
        "field: Q\ngrading: trivial\nbcommutative: true\n\n"
        + _M7_TABLE + "\n" + _M7_FORM.format(e11=2)
    ),
    "sl2": """\
format_version: 1
name: sl2
description: sl(2) with basis h, e, f and the trace form scaled so that (h,h) = 2.
field: Q
grading: trivial
bcommutative: true

[basis]
h 0
e 0
f 0

[products]
h * e = 2 e
h * f = -2 f
e * f = 1 h

[form]
2 0 0
0 0 1
0 1 0

[toral]
1 0 0
""",
    "osp12": """\
format_version: 1
name: osp12
description: Lie superalgebra osp(1|2): even part sl(2) = <h, e, f>, odd part <x, y> with h-weights 1 and -1.
field: Q
grading: Z2
bcommutative: true

[basis]
h 0
e 0
f 0
x 1
y 1

[products]
h * e = 2 e
h * f = -2 f
h * x = 1 x
h * y = -1 y
e * f = 1 h
e * y = 1 x
f * x = 1 y
x * x = -2 e
x * y = 1 h
y * y = 2 f

[form]
2 0 0 0 0
0 0 1 0 0
0 1 0 0 0
0 0 0 0 2
0 0 0 -2 0

[toral]
1 0 0 0 0
""",
    "abelian2": """\
format_version: 1
name: abelian2
description: Two-dimensional algebra with zero product and zero form.
field: Q
grading: trivial
bcommutative: true

[basis]
e1 0
e2 0

[products]

[form]
0 0
0 0

[toral]
1 0
""",
}

BUILTIN_NAMES = tuple(_DOCS)


def builtin_document(name: str) -> str:
    try:
        return _DOCS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None


def builtin(name: str) -> Tuple[StructureAlgebra, Optional[ToralPair]]:
    from .iolib import parse_algebra

    return parse_algebra(builtin_document(name))
