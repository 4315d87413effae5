"""Dense exact linear algebra over the rationals.

Matrices are lists of rows of ``Fraction``; vectors are lists. Everything here
is small (dimension in the tens), so plain Gauss-Jordan elimination is enough.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence

Vector = List[Fraction]
Matrix = List[List[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence[Fraction]], n_cols: Optional[int] = None) -> Matrix:
    if not m:
        return [[] for _ in range(n_cols or 0)]
    return [list(col) for col in zip(*m)]


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return [sum((a * b for a, b in zip(row, v)), ZERO) for row in m]


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in bt] for row in a]


def rref(m: Sequence[Sequence[Fraction]], n_cols: Optional[int] = None):
    """Reduced row echelon form. Returns ``(rows, pivot_columns)``; zero rows dropped."""
    work = as_matrix(m)
    if n_cols is None:
        n_cols = len(work[0]) if work else 0
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        piv = None
        for i in range(r, len(work)):
            if work[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        p = work[r][c]
        if p != 1:
            work[r] = [x / p for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(m: Sequence[Sequence[Fraction]], n_cols: Optional[int] = None) -> int:
    return len(rref(m, n_cols)[1])


def nullspace(m: Sequence[Sequence[Fraction]], n_cols: int) -> List[Vector]:
    """Basis of ``{v : m v = 0}``, one vector per free column, normalised to 1 there."""
    rows, pivots = rref(m, n_cols)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n_cols
        v[f] = ONE
        for row, pc in zip(rows, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(m: Sequence[Sequence[Fraction]], b: Sequence[Fraction], n_cols: int) -> Optional[Vector]:
    """One solution of ``m x = b`` (free variables set to zero), or None if inconsistent."""
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(m, b)]
    rows, pivots = rref(aug, n_cols + 1)
    if pivots and pivots[-1] == n_cols:
        return None
    x = [ZERO] * n_cols
    for row, pc in zip(rows, pivots):
        x[pc] = row[n_cols]
    return x


def coordinates(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Optional[Vector]:
    """Coefficients expressing ``v`` in the (independent) ``basis``, or None if outside the span."""
    if not basis:
        return [] if all(x == 0 for x in v) else None
    return solve(transpose(basis), v, len(basis))


def in_span(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    return coordinates(basis, v) is not None


def span_basis(vectors: Sequence[Sequence[Fraction]], dim: int) -> List[Vector]:
    """Canonical (row-reduced) basis of the span."""
    if not vectors:
        return []
    return rref(vectors, dim)[0]


def intersect(u: Sequence[Sequence[Fraction]], w: Sequence[Sequence[Fraction]], dim: int) -> List[Vector]:
    """Row-reduced basis of span(u) ∩ span(w)."""
    if not u or not w:
        return []
    # solve sum a_i u_i - sum b_j w_j = 0
    cols = [list(x) for x in u] + [[-c for c in x] for x in w]
    kernel = nullspace(transpose(cols), len(cols))
    out = []
    for k in kernel:
        out.append([sum((k[i] * u[i][c] for i in range(len(u))), ZERO) for c in range(dim)])
    return span_basis(out, dim)


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    work = as_matrix(m)
    n = len(work)
    result = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if work[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            result = -result
        p = work[c][c]
        result *= p
        for i in range(c + 1, n):
            if work[i][c] != 0:
                f = work[i][c] / p
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return result


def inverse(m: Sequence[Sequence[Fraction]]) -> Optional[Matrix]:
    n = len(m)
    aug = [list(row) + idrow for row, idrow in zip(m, identity(n))]
    rows, pivots = rref(aug, 2 * n)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in rows[:n]]


def charpoly(m: Sequence[Sequence[Fraction]]) -> List[Fraction]:
    """Coefficients ``[c_0, ..., c_n]`` of ``det(x I - m)``, lowest degree first (monic).

    Faddeev-LeVerrier recursion; exact in characteristic zero.
    """
    n = len(m)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    aux = [[ZERO] * n for _ in range(n)]
    for k in range(1, n + 1):
        # aux <- m (aux + c_{n-k+1} I)
        c_prev = coeffs[n - k + 1]
        shifted = [row[:] for row in aux]
        for i in range(n):
            shifted[i][i] += c_prev
        aux = mat_mul(m, shifted)
        trace = sum((aux[i][i] for i in range(n)), ZERO)
        coeffs[n - k] = -trace / k
    return coeffs


def _int_divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _poly_divide_linear(coeffs: List[Fraction], r: Fraction) -> List[Fraction]:
    """Synthetic division of a low-first coefficient list by (x - r); assumes r is a root."""
    n = len(coeffs) - 1
    out = [ZERO] * n
    carry = ZERO
    for i in range(n, 0, -1):
        carry = coeffs[i] + carry * r
        out[i - 1] = carry
    return out


def _poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_roots(coeffs: Sequence[Fraction]):
    """Rational roots with multiplicities of a polynomial (low-first coefficients).

    Returns ``(roots, remainder)`` where ``roots`` maps root -> multiplicity and
    ``remainder`` is the leftover factor with no rational roots (``[1]`` when the
    polynomial splits).
    """
    poly = [Fraction(c) for c in coeffs]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    roots: dict = {}
    while len(poly) > 1 and poly[0] == 0:
        roots[ZERO] = roots.get(ZERO, 0) + 1
        poly = poly[1:]
    if len(poly) > 1:
        denom = 1
        for c in poly:
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        ints = [int(c * denom) for c in poly]
        lead, const = ints[-1], ints[0]
        candidates = set()
        for p in _int_divisors(const):
            for q in _int_divisors(lead):
                candidates.add(Fraction(p, q))
                candidates.add(Fraction(-p, q))
        for r in sorted(candidates):
            while len(poly) > 1 and _poly_eval(poly, r) == 0:
                roots[r] = roots.get(r, 0) + 1
                poly = _poly_divide_linear(poly, r)
    lead = poly[-1]
    return roots, [c / lead for c in poly]

