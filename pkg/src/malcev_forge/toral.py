"""Root space decompositions with respect to a toral subalgebra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import linalg
from .algebra import AlgebraError, Elem, StructureAlgebra, format_terms
from .identities import check_identity, malcev_identity_for
from .report import CONDITIONAL, FAIL, PASS, CheckReport


class NotToral(AlgebraError):
    """The declared H does not give a root space decomposition of A."""


class NotSplit(NotToral):
    """Some L_h has an irrational eigenvalue or is not semisimple."""


class Root(tuple):
    """A linear functional on H, stored by its values on the chosen H basis."""

    def __new__(cls, values: Iterable = ()):
        return super().__new__(cls, (Fraction(v) for v in values))

    def __neg__(self) -> "Root":
        return Root(-v for v in self)

    def __add__(self, other) -> "Root":
        return Root(a + b for a, b in zip(self, other))

    def __sub__(self, other) -> "Root":
        return Root(a - b for a, b in zip(self, other))

    def scale(self, c) -> "Root":
        return Root(c * v for v in self)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self)

    def __call__(self, coeffs: Sequence[Fraction]) -> Fraction:
        """Value on the element ``sum coeffs[i] * h_i`` of H."""
        return sum((c * v for c, v in zip(coeffs, self)), Fraction(0))

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self) + ")"

    def __repr__(self):
        return f"Root{str(self)}"

    def __reduce__(self):
        return (Root, (tuple(self),))


def root_order(r: Root):
    """Zero root first, then decreasing lexicographic order (so alpha before -alpha)."""
    return (not r.is_zero, tuple(-v for v in r))


@dataclass(eq=False)
class ToralPair:
    alg: StructureAlgebra
    h_basis: List[Elem]

    def __post_init__(self):
        if not self.h_basis:
            raise NotToral("H must be nonzero")
        self.h_basis = [h if isinstance(h, Elem) else self.alg.elem(h) for h in self.h_basis]
        for h in self.h_basis:
            if not h:
                raise NotToral("zero vector in H basis")
            if h.degrees() != {0}:
                raise NotToral(f"H basis vector {h} is not of degree 0")
        dense = [h.dense() for h in self.h_basis]
        if linalg.rank(dense, self.alg.dim) != len(dense):
            raise NotToral("H basis is linearly dependent")
        for h, k in itertools.product(self.h_basis, repeat=2):
            if not linalg.in_span(dense, (h * k).dense()):
                raise NotToral(f"H is not a subalgebra: {h}*{k} = {h * k}")

    @property
    def dim(self) -> int:
        return len(self.h_basis)

    def h_coordinates(self, x: Elem) -> Optional[List[Fraction]]:
        """Coordinates of x in the H basis, or None if x is not in H."""
        return linalg.coordinates([h.dense() for h in self.h_basis], x.dense())


@dataclass(eq=False)
class RootDatum:
    pair: ToralPair
    roots: List[Root]
    spaces: Dict[Root, List[Elem]]
    graded_pieces: Dict[Tuple[Root, int], List[Elem]]
    per_degree: Dict[int, Set[Root]] = field(default_factory=dict)

    def __post_init__(self):
        alg = self.pair.alg
        cols = []
        self._slices: Dict[Root, Tuple[int, int]] = {}
        for r in self.roots:
            start = len(cols)
            cols.extend(v.dense() for v in self.spaces[r])
            self._slices[r] = (start, len(cols))
        self._change = linalg.inverse(linalg.transpose(cols)) if len(cols) == alg.dim else None

    @property
    def alg(self) -> StructureAlgebra:
        return self.pair.alg

    def dims(self) -> Dict[Root, int]:
        return {r: len(self.spaces[r]) for r in self.roots}

    def components(self, x: Elem) -> Dict[Root, Elem]:
        """Split x along the root space decomposition (only nonzero parts)."""
        coords = linalg.mat_vec(self._change, x.dense())
        out = {}
        for r in self.roots:
            a, b = self._slices[r]
            part = self.alg.zero()
            for c, v in zip(coords[a:b], self.spaces[r]):
                if c:
                    part = part + c * v
            if part:
                out[r] = part
        return out

    def root_of(self, r) -> Root:
        r = Root(r)
        if r not in self.spaces:
            raise KeyError(f"{r} is not a root")
        return r

    def zero_root(self) -> Root:
        return Root([0] * self.pair.dim)


def _eigenspaces(alg: StructureAlgebra, h: Elem) -> Dict[Fraction, List[List[Fraction]]]:
    n = alg.dim
    m = alg.left_matrix(h)
    roots, rest = linalg.rational_roots(linalg.charpoly(m))
    if len(rest) > 1:
        poly = format_terms((c, f"x^{i}") for i, c in enumerate(rest) if c)
        raise NotSplit(f"L_{{{h}}} is not split over Q: characteristic polynomial has factor {poly}")
    spaces = {}
    for lam, mult in sorted(roots.items()):
        shifted = [[m[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        ker = linalg.nullspace(shifted, n)
        if len(ker) != mult:
            raise NotSplit(
                f"L_{{{h}}} is not semisimple: eigenvalue {lam} has multiplicity {mult} "
                f"but eigenspace dimension {len(ker)} (factor (x - {lam})^{mult})"
            )
        spaces[lam] = linalg.span_basis(ker, n)
    return spaces


def decompose(pair: ToralPair) -> RootDatum:
    """Joint eigenspace decomposition of A under left multiplication by H."""
    alg = pair.alg
    n = alg.dim
    blocks: List[Tuple[Tuple[Fraction, ...], List[List[Fraction]]]] = [((), linalg.identity(n))]
    for h in pair.h_basis:
        eig = _eigenspaces(alg, h)
        refined = []
        for values, space in blocks:
            for lam, es in eig.items():
                common = linalg.intersect(space, es, n)
                if common:
                    refined.append((values + (lam,), common))
        blocks = refined
    total = sum(len(space) for _, space in blocks)
    if total != n:
        raise NotToral(f"joint eigenspaces of H span only {total} of {n} dimensions")
    spaces = {Root(values): [alg.elem(v) for v in space] for values, space in blocks}
    roots = sorted(spaces, key=root_order)
    graded: Dict[Tuple[Root, int], List[Elem]] = {}
    per_degree: Dict[int, Set[Root]] = {b: set() for b in alg.grading.elements()}
    for r in roots:
        dense = [v.dense() for v in spaces[r]]
        for b in alg.grading.elements():
            piece_basis = [linalg.identity(n)[i] for i in alg.piece(b)]
            common = linalg.intersect(dense, piece_basis, n) if piece_basis else []
            if common:
                graded[(r, b)] = [alg.elem(v) for v in common]
                per_degree[b].add(r)
    return RootDatum(pair, roots, spaces, graded, per_degree)


def root_support(datum: RootDatum, b: int) -> Set[Root]:
    datum.alg.grading.check(b)
    return set(datum.per_degree.get(b, set()))


def check_root_symmetry(datum: RootDatum) -> CheckReport:
    """R_{-b} = -R_b for every degree b."""
    g = datum.alg.grading
    rep = CheckReport(subject={"algebra": datum.alg.name or "?"})
    for b in g.elements():
        for r in sorted(datum.per_degree[b], key=root_order):
            if -r not in datum.per_degree[g.neg(b)]:
                rep.add("root_symmetry", FAIL, witness={"root": str(r), "degree": b,
                                                       "missing": f"{-r} in degree {g.neg(b)}"})
                return rep
    rep.add("root_symmetry", PASS)
    return rep


def verify_toral(datum: RootDatum) -> CheckReport:
    alg = datum.alg
    pair = datum.pair
    rep = CheckReport(subject={"algebra": alg.name or "?", "H": [str(h) for h in pair.h_basis]})

    bad = next(((h, k) for h, k in itertools.product(pair.h_basis, repeat=2) if h * k), None)
    if bad is None:
        rep.add("H_abelian", PASS, count=pair.dim ** 2)
    else:
        h, k = bad
        rep.add("H_abelian", FAIL, witness={"elements": [str(h), str(k)], "product": str(h * k)})

    zero = datum.zero_root()
    a0 = datum.spaces.get(zero, [])
    dense0 = [v.dense() for v in a0]
    bad = None
    for u, v in itertools.product(a0, repeat=2):
        p = u * v
        if not linalg.in_span(dense0, p.dense()):
            bad = (u, v, p)
            break
    if bad is None:
        rep.add("A0_closed", PASS, count=len(a0) ** 2, A0=[str(v) for v in a0])
    else:
        u, v, p = bad
        rep.add("A0_closed", FAIL, witness={"elements": [str(u), str(v)], "product": str(p)})

    cols = [v.dense() for r in datum.roots for v in datum.spaces[r]]
    r = linalg.rank(cols, alg.dim) if cols else 0
    if r == alg.dim and len(cols) == alg.dim:
        rep.add("decomposition_complete", PASS, rank=r)
    else:
        rep.add("decomposition_complete", FAIL, witness={"rank": r, "dim": alg.dim})
    return rep


def check_partial_grading(datum: RootDatum) -> CheckReport:
    """Containments A^a A^b in A^(a+b) (a != b) and A^a A^a in A^(2a) + A^(-a)."""
    alg = datum.alg
    rep = CheckReport(subject={"algebra": alg.name or "?"})
    ident = malcev_identity_for(alg.grading)
    hyp = check_identity(alg, ident)
    established = hyp.ok
    rep.add("hypothesis", PASS if established else CONDITIONAL, identity=ident.name,
            note="identity holds" if established else "identity fails; containments are not implied")
    roots = datum.roots
    for a, b in itertools.product(roots, repeat=2):
        allowed = {a + b} if a != b else {a + b, -a}
        bad = None
        for u, v in itertools.product(datum.spaces[a], datum.spaces[b]):
            p = u * v
            if not p:
                continue
            comps = datum.components(p)
            off = [r for r in comps if r not in allowed]
            if off:
                bad = (u, v, p, off[0])
                break
        name = f"cell({a},{b})"
        targets = sorted((str(r) for r in allowed))
        if bad is None:
            rep.add(name, PASS, targets=targets)
        else:
            u, v, p, r = bad
            rep.add(name, FAIL if established else CONDITIONAL,
                    witness={"elements": [str(u), str(v)], "product": str(p), "outside_root": str(r)},
                    targets=targets)
    return rep
