"""Jacobians, polynomial identities and bilinear-form checks.

The checking engine works on any *product table*: an object with
``product(i, j) -> {k: coeff}``, ``degree(i)``, ``label(i)`` and a ``grading``
attribute. :class:`~malcev_forge.algebra.StructureAlgebra` is one; the
truncated loop algebras of :mod:`malcev_forge.loop` are another.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebra import AlgebraError, Elem, StructureAlgebra, Vec, format_terms, vec_axpy
from .report import FAIL, PASS, CheckReport

Operand = Union[int, Vec]

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 200
SAMPLE_RANGE = 2


def format_vec(table, v: Mapping[int, Fraction]) -> str:
    return format_terms((c, table.label(k)) for k, c in sorted(v.items()))


class Evaluator:
    """Multiplies operands that are either basis indices or sparse vectors.

    Left-normed products of up to three basis indices are memoised; that is
    where exhaustive scans spend their time.
    """

    def __init__(self, table):
        self.table = table
        self._cache3: Dict[Tuple[int, int, int], Vec] = {}

    def m(self, a: Operand, b: Operand) -> Vec:
        prod = self.table.product
        if isinstance(a, int):
            if isinstance(b, int):
                return prod(a, b)
            acc: Vec = {}
            for j, cb in b.items():
                p = prod(a, j)
                if p:
                    vec_axpy(acc, cb, p)
            return acc
        acc = {}
        if isinstance(b, int):
            for i, ca in a.items():
                p = prod(i, b)
                if p:
                    vec_axpy(acc, ca, p)
            return acc
        for i, ca in a.items():
            for j, cb in b.items():
                p = prod(i, j)
                if p:
                    vec_axpy(acc, ca * cb, p)
        return acc

    def lm(self, *args: Operand) -> Vec:
        """Left-normed product ``((a b) c) d ...``."""
        if len(args) == 3 and all(isinstance(a, int) for a in args):
            key = args
            hit = self._cache3.get(key)
            if hit is None:
                hit = self.m(self.table.product(args[0], args[1]), args[2])
                self._cache3[key] = hit
            return hit
        if len(args) == 2:
            return self.m(args[0], args[1])
        if len(args) > 3:
            return self.m(self.lm(*args[:-1]), args[-1])
        return self.m(self.m(args[0], args[1]), args[2])


def _combine(*terms) -> Vec:
    acc: Vec = {}
    for c, v in terms:
        if c and v:
            vec_axpy(acc, c, v)
    return acc


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def jacobian_vec(ev: Evaluator, x: Operand, y: Operand, z: Operand) -> Vec:
    return _combine((1, ev.lm(x, y, z)), (1, ev.lm(z, x, y)), (1, ev.lm(y, z, x)))


def super_jacobian_vec(ev: Evaluator, x, y, z, dx: int, dy: int, dz: int) -> Vec:
    return _combine(
        (_sgn(dx * dz), ev.lm(x, y, z)),
        (_sgn(dz * dy), ev.lm(z, x, y)),
        (_sgn(dy * dx), ev.lm(y, z, x)),
    )


# identity residuals: (evaluator, operands, degrees) -> residual vector

def _res_bcomm(ev, a, d):
    x, y = a
    s = ev.table.grading.sign_commute(d[0], d[1])
    return _combine((1, ev.m(x, y)), (-s, ev.m(y, x)))


def _res_jacobi(ev, a, d):
    return jacobian_vec(ev, *a)


def _res_super_jacobi(ev, a, d):
    return super_jacobian_vec(ev, *a, *d)


def _res_sagle(ev, a, d):
    x, y, z, t = a
    return _combine(
        (1, ev.lm(x, y, z, t)),
        (1, ev.lm(t, x, y, z)),
        (1, ev.lm(z, t, x, y)),
        (1, ev.lm(y, z, t, x)),
        (-1, ev.m(ev.lm(x, z), ev.lm(y, t))),
    )


def _res_super_sagle(ev, a, d):
    x, y, z, t = a
    dx, dy, dz, dt = d
    return _combine(
        (1, ev.lm(x, y, z, t)),
        (_sgn(dx * (dy + dz + dt)), ev.lm(y, z, t, x)),
        (_sgn((dx + dy) * (dz + dt)), ev.lm(z, t, x, y)),
        (_sgn(dt * (dx + dy + dz)), ev.lm(t, x, y, z)),
        (-_sgn(dy * dz), ev.m(ev.lm(x, z), ev.lm(y, t))),
    )


def _as_vec(a: Operand) -> Vec:
    return {a: Fraction(1)} if isinstance(a, int) else a


def _res_malcev(ev, a, d):
    x, y, z = a
    dx, dy, dz = d
    g = ev.table.grading
    xz = ev.m(x, z)
    lhs = super_jacobian_vec(ev, x, y, xz, dx, dy, g.add(dx, dz))
    rhs = ev.m(super_jacobian_vec(ev, x, y, z, dx, dy, dz), x)
    return _combine((1, lhs), (-1, rhs))


def _res_binary_lie(ev, a, d):
    x, y = a
    dx, dy = d
    xy = ev.m(x, y)
    return super_jacobian_vec(ev, xy, x, y, ev.table.grading.add(dx, dy), dx, dy)


def _res_sagle_extended(ev, a, d):
    x, y = a
    dx, dy = d
    xy = ev.m(x, y)
    return super_jacobian_vec(ev, x, y, xy, dx, dy, ev.table.grading.add(dx, dy))


@dataclass(frozen=True)
class IdentitySpec:
    name: str
    arity: int
    multilinear: bool
    formula: str
    residual: Callable


IDENTITIES: Dict[str, IdentitySpec] = {
    s.name: s
    for s in [
        IdentitySpec("b_commutativity", 2, True, "xy - eps(|x||y|) yx", _res_bcomm),
        IdentitySpec("jacobi", 3, True, "(xy)z + (zx)y + (yz)x", _res_jacobi),
        IdentitySpec("super_jacobi", 3, True, "signed Jacobian", _res_super_jacobi),
        IdentitySpec("sagle", 4, True, "((xy)z)t + ((tx)y)z + ((zt)x)y + ((yz)t)x - (xz)(yt)", _res_sagle),
        IdentitySpec("super_sagle", 4, True, "graded Sagle identity", _res_super_sagle),
        IdentitySpec("malcev_original", 3, False, "J(x,y,xz) - J(x,y,z)x", _res_malcev),
        IdentitySpec("binary_lie", 2, False, "J(xy,x,y)", _res_binary_lie),
        IdentitySpec("sagle_extended", 2, False, "J(x,y,xy)", _res_sagle_extended),
    ]
}


def identity_spec(name) -> IdentitySpec:
    if isinstance(name, IdentitySpec):
        return name
    try:
        return IDENTITIES[name]
    except KeyError:
        raise ValueError(f"unknown identity {name!r}; choose from {', '.join(IDENTITIES)}") from None


def malcev_identity_for(grading) -> IdentitySpec:
    """Multilinear Malcev test appropriate to the grading."""
    return IDENTITIES["sagle" if grading.is_trivial else "super_sagle"]


def lie_identity_for(grading) -> IdentitySpec:
    return IDENTITIES["jacobi" if grading.is_trivial else "super_jacobi"]


# Elem-level API ---------------------------------------------------------

def _homogeneous_degree(x: Elem) -> int:
    if not x.is_homogeneous:
        raise AlgebraError(f"{x} is not homogeneous")
    return x.degree


def jacobian(alg: StructureAlgebra, x: Elem, y: Elem, z: Elem) -> Elem:
    ev = Evaluator(alg)
    return Elem(alg, jacobian_vec(ev, x.coeffs, y.coeffs, z.coeffs))


def super_jacobian(alg: StructureAlgebra, x: Elem, y: Elem, z: Elem) -> Elem:
    degs = [_homogeneous_degree(v) for v in (x, y, z)]
    ev = Evaluator(alg)
    return Elem(alg, super_jacobian_vec(ev, x.coeffs, y.coeffs, z.coeffs, *degs))


def residual(alg, spec, elems: Sequence[Elem]) -> Elem:
    """Residual of an identity on concrete homogeneous elements."""
    spec = identity_spec(spec)
    if len(elems) != spec.arity:
        raise ValueError(f"{spec.name} takes {spec.arity} arguments")
    degs = [_homogeneous_degree(v) for v in elems]
    return Elem(alg, spec.residual(Evaluator(alg), [e.coeffs for e in elems], degs))


# exhaustive engine --------------------------------------------------------

def _first_failure(table, spec: IdentitySpec, n: int, firsts: Sequence[int], ev=None):
    ev = ev or Evaluator(table)
    deg = table.degree
    res = spec.residual
    rest = list(itertools.product(range(n), repeat=spec.arity - 1))
    for f in firsts:
        df = deg(f)
        for tail in rest:
            args = (f,) + tail
            if res(ev, args, (df,) + tuple(deg(i) for i in tail)):
                return args
    return None


_WORKER_TABLE = None


def _worker_init(table):
    global _WORKER_TABLE
    _WORKER_TABLE = (table, Evaluator(table))


def _worker_scan(spec_name: str, n: int, first: int):
    table, ev = _WORKER_TABLE
    return _first_failure(table, IDENTITIES[spec_name], n, [first], ev)


def scan_basis(table, spec, n: int, threads: int = 1) -> Optional[Tuple[int, ...]]:
    """Lexicographically smallest basis tuple (indices < n) with nonzero residual, or None."""
    spec = identity_spec(spec)
    if threads <= 1 or n < 2:
        return _first_failure(table, spec, n, range(n))
    with ProcessPoolExecutor(max_workers=threads, initializer=_worker_init, initargs=(table,)) as pool:
        futures = [pool.submit(_worker_scan, spec.name, n, f) for f in range(n)]
        try:
            for fut in futures:
                hit = fut.result()
                if hit is not None:
                    return hit
        finally:
            for fut in futures:
                fut.cancel()
    return None


def tuple_rank(args: Sequence[int], n: int) -> int:
    r = 0
    for a in args:
        r = r * n + a
    return r


def check_identity_table(
    table,
    spec,
    n: int,
    mode: str = "exhaustive",
    seed: int = DEFAULT_SEED,
    count: int = DEFAULT_SAMPLES,
    threads: int = 1,
    check_name: Optional[str] = None,
) -> CheckReport:
    spec = identity_spec(spec)
    rep = CheckReport(subject={"algebra": getattr(table, "name", "") or "?"})
    name = check_name or spec.name
    if mode == "exhaustive":
        if not spec.multilinear:
            raise ValueError(f"{spec.name} is not multilinear; use sampled mode")
        hit = scan_basis(table, spec, n, threads)
        total = n ** spec.arity
        if hit is None:
            rep.add(name, PASS, count=total, mode="exhaustive", exact=True, tuples=total)
        else:
            ev = Evaluator(table)
            res = spec.residual(ev, hit, tuple(table.degree(i) for i in hit))
            rep.add(
                name, FAIL, count=tuple_rank(hit, n) + 1,
                witness={"elements": [table.label(i) for i in hit], "residual": format_vec(table, res)},
                mode="exhaustive", exact=True, tuples=total,
            )
        return rep
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    ev = Evaluator(table)
    by_degree: Dict[int, List[int]] = {}
    for i in range(n):
        by_degree.setdefault(table.degree(i), []).append(i)
    degrees = sorted(by_degree)
    for trial in range(count):
        args, degs = [], []
        for _ in range(spec.arity):
            d = rng.choice(degrees) if len(degrees) > 1 else degrees[0]
            v = {}
            for i in by_degree[d]:
                c = rng.randint(-SAMPLE_RANGE, SAMPLE_RANGE)
                if c:
                    v[i] = Fraction(c)
            args.append(v)
            degs.append(d)
        res = spec.residual(ev, args, degs)
        if res:
            rep.add(
                name, FAIL, count=trial + 1,
                witness={
                    "elements": [format_vec(table, a) for a in args],
                    "residual": format_vec(table, res),
                    "trial": trial,
                },
                mode="sampled", seed=seed, samples=count, exact=True,
            )
            return rep
    rep.add(name, PASS, count=count, mode="sampled", seed=seed, samples=count, exact=False,
            note="probabilistic pass: no failure among sampled tuples")
    return rep


def check_identity(
    alg: StructureAlgebra,
    spec,
    mode: str = "exhaustive",
    seed: int = DEFAULT_SEED,
    count: int = DEFAULT_SAMPLES,
    threads: int = 1,
) -> CheckReport:
    """Check an identity on ``alg``.

    Exhaustive mode scans every basis tuple, which decides a multilinear
    identity exactly. Sampled mode substitutes random homogeneous elements with
    integer coefficients in [-2, 2]; failures are certain, passes are not.
    """
    rep = check_identity_table(alg, spec, alg.dim, mode, seed, count, threads)
    rep.subject = {"algebra": alg.name or "?", "dim": alg.dim, "grading": alg.grading.name}
    return rep


# forms ---------------------------------------------------------------------

def check_form(alg: StructureAlgebra) -> CheckReport:
    """Invariance, B-symmetry, B-gradedness and nondegeneracy of the form."""
    if alg.gram is None:
        raise AlgebraError(f"algebra {alg.name or '?'} has no bilinear form")
    n = alg.dim
    g = alg.gram
    names = alg.basis
    grading = alg.grading
    rep = CheckReport(subject={"algebra": alg.name or "?", "dim": n, "grading": grading.name})

    hit = None
    for i, j, k in itertools.product(range(n), repeat=3):
        left = alg.form_vec(alg.product(i, j), {k: Fraction(1)})
        right = alg.form_vec({i: Fraction(1)}, alg.product(j, k))
        if left != right:
            hit = (i, j, k, left, right)
            break
    if hit is None:
        rep.add("invariant", PASS, count=n ** 3)
    else:
        i, j, k, left, right = hit
        rep.add(
            "invariant", FAIL, count=(i * n + j) * n + k + 1,
            witness={
                "elements": [names[i], names[j], names[k]],
                "lhs": f"({names[i]}{names[j]},{names[k]}) = {left}",
                "rhs": f"({names[i]},{names[j]}{names[k]}) = {right}",
                "lhs_value": left,
                "rhs_value": right,
            },
        )

    hit = None
    for i, j in itertools.product(range(n), repeat=2):
        s = grading.sign_commute(alg.degrees[i], alg.degrees[j])
        if g[i][j] != -s * g[j][i]:
            hit = (i, j)
            break
    if hit is None:
        rep.add("b_symmetric", PASS, count=n * n)
    else:
        i, j = hit
        rep.add("b_symmetric", FAIL, count=i * n + j + 1,
                witness={"elements": [names[i], names[j]], "values": [g[i][j], g[j][i]]})

    hit = None
    for i, j in itertools.product(range(n), repeat=2):
        if g[i][j] and grading.add(alg.degrees[i], alg.degrees[j]) != 0:
            hit = (i, j)
            break
    if hit is None:
        rep.add("b_graded", PASS, count=n * n)
    else:
        i, j = hit
        rep.add("b_graded", FAIL, count=i * n + j + 1,
                witness={"elements": [names[i], names[j]], "value": g[i][j]})

    r = linalg.rank(g, n)
    d = linalg.det(g) if n else Fraction(1)
    if r == n:
        rep.add("nondegenerate", PASS, rank=r, det=d)
    else:
        kernel = linalg.nullspace(g, n)[0]
        rep.add("nondegenerate", FAIL, rank=r, det=d,
                witness={"kernel_vector": format_terms((c, names[i]) for i, c in enumerate(kernel) if c)})
    return rep
