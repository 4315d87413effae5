"""Finite-dimensional graded algebras given by structure constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .grading import GradingGroup

Vec = Dict[int, Fraction]


class AlgebraError(ValueError):
    pass


# sparse vector helpers: dict index -> nonzero Fraction

def vec_add(u: Mapping[int, Fraction], v: Mapping[int, Fraction], scale=1) -> Vec:
    out = dict(u)
    for k, c in v.items():
        s = out.get(k, 0) + scale * c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_scale(u: Mapping[int, Fraction], c) -> Vec:
    if not c:
        return {}
    return {k: c * x for k, x in u.items()}


def vec_axpy(acc: Vec, c, v: Mapping[int, Fraction]) -> None:
    """In place: acc += c * v."""
    for k, x in v.items():
        s = acc.get(k, 0) + c * x
        if s:
            acc[k] = s
        else:
            del acc[k]


def format_terms(items: Iterable[Tuple[Fraction, str]]) -> str:
    parts = []
    for c, name in items:
        c = Fraction(c)
        if c == 1:
            term = name
        elif c == -1:
            term = "-" + name
        else:
            term = f"{c}*{name}"
        parts.append(term)
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


class Elem:
    """An immutable element of a :class:`StructureAlgebra` (sparse coefficients)."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg: "StructureAlgebra", coeffs: Mapping[int, object] = ()):
        clean = {}
        for k, c in dict(coeffs).items():
            c = Fraction(c)
            if c:
                if not 0 <= k < alg.dim:
                    raise IndexError(f"basis index {k} out of range for dimension {alg.dim}")
                clean[k] = c
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Elem is immutable")

    def __reduce__(self):
        return (Elem, (self.alg, self.coeffs))

    def _wrap(self, coeffs):
        return Elem(self.alg, coeffs)

    def __add__(self, other: "Elem") -> "Elem":
        return self._wrap(vec_add(self.coeffs, other.coeffs))

    def __sub__(self, other: "Elem") -> "Elem":
        return self._wrap(vec_add(self.coeffs, other.coeffs, -1))

    def __neg__(self) -> "Elem":
        return self._wrap(vec_scale(self.coeffs, -1))

    def __mul__(self, other):
        if isinstance(other, Elem):
            return self.alg.mul(self, other)
        return self._wrap(vec_scale(self.coeffs, Fraction(other)))

    def __rmul__(self, c):
        return self._wrap(vec_scale(self.coeffs, Fraction(c)))

    def __eq__(self, other):
        if isinstance(other, Elem):
            return self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def dense(self) -> List[Fraction]:
        out = [linalg.ZERO] * self.alg.dim
        for k, c in self.coeffs.items():
            out[k] = c
        return out

    def degrees(self) -> set:
        return {self.alg.degrees[k] for k in self.coeffs}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int:
        """Degree of a nonzero homogeneous element; zero counts as degree 0."""
        ds = self.degrees()
        if len(ds) > 1:
            raise AlgebraError(f"{self} is not homogeneous")
        return ds.pop() if ds else 0

    def __str__(self):
        return format_terms((c, self.alg.basis[k]) for k, c in self.coeffs.items())

    def __repr__(self):
        return f"Elem({self})"


@dataclass(eq=False)
class StructureAlgebra:
    """A B-graded algebra: ``e_i e_j = sum_k sc[(i, j)][k] e_k``.

    ``sc`` holds only nonzero products, both orders stored. ``gram`` is the
    optional bilinear form ``(e_i, e_j)``.
    """

    grading: GradingGroup
    basis: Tuple[str, ...]
    degrees: Tuple[int, ...]
    sc: Dict[Tuple[int, int], Vec]
    gram: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    name: str = ""
    description: str = ""
    _index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.basis = tuple(self.basis)
        self.degrees = tuple(self.grading.check(d) for d in self.degrees)
        if len(self.basis) != len(self.degrees):
            raise AlgebraError("basis and degrees differ in length")
        if len(set(self.basis)) != len(self.basis):
            raise AlgebraError("basis names must be unique")
        self._index = {n: i for i, n in enumerate(self.basis)}
        n = len(self.basis)
        clean = {}
        for (i, j), vec in self.sc.items():
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"product index ({i}, {j}) out of range")
            v = {k: Fraction(c) for k, c in vec.items() if c}
            for k in v:
                if not 0 <= k < n:
                    raise IndexError(f"result index {k} out of range")
                want = self.grading.add(self.degrees[i], self.degrees[j])
                if self.degrees[k] != want:
                    raise AlgebraError(
                        f"grading violated: {self.basis[i]}*{self.basis[j]} has a "
                        f"{self.basis[k]} component of degree {self.degrees[k]}, expected {want}"
                    )
            if v:
                clean[(i, j)] = dict(sorted(v.items()))
        self.sc = clean
        if self.gram is not None:
            g = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
            if len(g) != n or any(len(row) != n for row in g):
                raise AlgebraError(f"form must be a {n}x{n} matrix")
            self.gram = g

    @classmethod
    def from_table(
        cls,
        grading: GradingGroup,
        basis: Sequence[str],
        degrees: Sequence[int],
        products: Mapping[Tuple[str, str], Mapping[str, object]],
        gram=None,
        bcommutative: bool = False,
        name: str = "",
        description: str = "",
    ) -> "StructureAlgebra":
        """Build from products keyed by basis names.

        With ``bcommutative`` the missing order of each pair is filled in via the
        commutation sign, and a pair given both ways must agree.
        """
        index = {n: i for i, n in enumerate(basis)}
        sc: Dict[Tuple[int, int], Vec] = {}
        for (a, b), result in products.items():
            for nm in (a, b, *result):
                if nm not in index:
                    raise AlgebraError(f"undeclared basis name {nm!r}")
            sc[(index[a], index[b])] = {index[k]: Fraction(c) for k, c in result.items() if Fraction(c)}
        if bcommutative:
            given = set(sc)
            for (i, j), v in list(sc.items()):
                s = grading.sign_commute(degrees[i], degrees[j])
                mirrored = {k: s * c for k, c in v.items()}
                if (j, i) in given:
                    if sc[(j, i)] != mirrored:
                        raise AlgebraError(
                            f"inconsistent products {basis[i]}*{basis[j]} and {basis[j]}*{basis[i]}"
                        )
                else:
                    sc[(j, i)] = mirrored
        alg = cls(grading, tuple(basis), tuple(degrees), sc, gram, name, description)
        if bcommutative:
            bad = alg.bcommutativity_witness()
            if bad is not None:
                i, j = bad
                raise AlgebraError(f"not B-commutative at ({basis[i]}, {basis[j]})")
        return alg

    # basic access ------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"unknown basis element {name!r}") from None

    def e(self, name_or_index) -> Elem:
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        if not 0 <= i < self.dim:
            raise IndexError(f"basis index {i} out of range")
        return Elem(self, {i: 1})

    def elem(self, coeffs) -> Elem:
        """Element from a dense list, or a mapping keyed by index or name."""
        if isinstance(coeffs, Mapping):
            return Elem(self, {(k if isinstance(k, int) else self.index(k)): c for k, c in coeffs.items()})
        coeffs = list(coeffs)
        if len(coeffs) != self.dim:
            raise AlgebraError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return Elem(self, dict(enumerate(coeffs)))

    def zero(self) -> Elem:
        return Elem(self, {})

    def gens(self) -> List[Elem]:
        return [self.e(i) for i in range(self.dim)]

    def label(self, i: int) -> str:
        return self.basis[i]

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def piece(self, b: int) -> List[int]:
        """Indices of basis elements of degree b."""
        return [i for i, d in enumerate(self.degrees) if d == b]

    # products ---------------------------------------------------------

    def product(self, i: int, j: int) -> Vec:
        return self.sc.get((i, j), {})

    def mul_vec(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Vec:
        acc: Vec = {}
        sc = self.sc
        for i, a in u.items():
            for j, b in v.items():
                p = sc.get((i, j))
                if p:
                    vec_axpy(acc, a * b, p)
        return acc

    def mul(self, a: Elem, b: Elem) -> Elem:
        self._own(a)
        self._own(b)
        return Elem(self, self.mul_vec(a.coeffs, b.coeffs))

    def _own(self, x: Elem) -> None:
        if x.alg is not self and x.alg.dim != self.dim:
            raise IndexError("element belongs to a different algebra")

    def form_vec(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Fraction:
        g = self.gram
        if g is None:
            raise AlgebraError(f"algebra {self.name or '?'} has no bilinear form")
        total = Fraction(0)
        for i, a in u.items():
            row = g[i]
            for j, b in v.items():
                if row[j]:
                    total += a * b * row[j]
        return total

    def form(self, a: Elem, b: Elem) -> Fraction:
        return self.form_vec(a.coeffs, b.coeffs)

    def form_entry(self, i: int, j: int) -> Fraction:
        if self.gram is None:
            raise AlgebraError(f"algebra {self.name or '?'} has no bilinear form")
        return self.gram[i][j]

    def left_matrix(self, x: Elem) -> linalg.Matrix:
        """Matrix of left multiplication by x (columns = images of basis vectors)."""
        cols = [self.mul_vec(x.coeffs, {j: Fraction(1)}) for j in range(self.dim)]
        return [[cols[j].get(i, linalg.ZERO) for j in range(self.dim)] for i in range(self.dim)]

    def bcommutativity_witness(self) -> Optional[Tuple[int, int]]:
        for i in range(self.dim):
            for j in range(self.dim):
                s = self.grading.sign_commute(self.degrees[i], self.degrees[j])
                if self.product(i, j) != vec_scale(self.product(j, i), s):
                    return i, j
        return None

    def with_gram(self, gram, name: Optional[str] = None, description: Optional[str] = None) -> "StructureAlgebra":
        return StructureAlgebra(
            self.grading, self.basis, self.degrees, dict(self.sc), gram,
            self.name if name is None else name,
            self.description if description is None else description,
        )

    def structurally_equal(self, other: "StructureAlgebra") -> bool:
        return (
            self.grading == other.grading
            and self.basis == other.basis
            and self.degrees == other.degrees
            and self.sc == other.sc
            and self.gram == other.gram
        )


def subalgebra(
    alg: StructureAlgebra,
    basis_vectors: Sequence[Elem],
    names: Optional[Sequence[str]] = None,
    name: str = "",
) -> Tuple[StructureAlgebra, linalg.Matrix]:
    """Structure constants of the subalgebra spanned by homogeneous ``basis_vectors``.

    Returns the new algebra (with the restricted form, if any) and the matrix
    whose rows express the new basis in the old one.
    """
    dense = [v.dense() for v in basis_vectors]
    m = len(dense)
    names = list(names) if names is not None else [f"b{i + 1}" for i in range(m)]
    degrees = [v.degree for v in basis_vectors]
    sc: Dict[Tuple[int, int], Vec] = {}
    for i, u in enumerate(basis_vectors):
        for j, w in enumerate(basis_vectors):
            p = alg.mul(u, w)
            if not p:
                continue
            coords = linalg.coordinates(dense, p.dense())
            if coords is None:
                raise AlgebraError("vectors do not span a subalgebra")
            sc[(i, j)] = {k: c for k, c in enumerate(coords) if c}
    gram = None
    if alg.gram is not None:
        gram = [[alg.form(u, w) for w in basis_vectors] for u in basis_vectors]
    sub = StructureAlgebra(alg.grading, tuple(names), tuple(degrees), sc, gram, name=name)
    return sub, dense
