"""Axioms of extended (affine) algebras: test-pairs, root pairings, the core."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple, Union

from . import linalg
from .algebra import AlgebraError, Elem, StructureAlgebra, subalgebra
from .identities import check_form
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport
from .toral import NotToral, Root, RootDatum, ToralPair, decompose, root_order, verify_toral

DEFAULT_BUDGET = 500
DEFAULT_SEED = 0
COEFF_RANGE = 3


class DegenerateOnH(AlgebraError):
    """The form restricted to H is degenerate, so t_alpha is undefined."""


@dataclass(eq=False)
class QuadraticToralPair:
    datum: RootDatum
    form_report: CheckReport = field(init=False)

    def __post_init__(self):
        alg = self.alg
        if alg.gram is None:
            raise AlgebraError(f"algebra {alg.name or '?'} has no bilinear form")
        self.form_report = check_form(alg)
        for name in ("b_symmetric", "b_graded"):
            c = self.form_report[name]
            if not c.ok:
                raise AlgebraError(f"form is not {name.replace('_', '-')}: {c.witness}")
        hs = self.pair.h_basis
        self.h_gram = [[alg.form(h, k) for k in hs] for h in hs]
        self.h_gram_rank = linalg.rank(self.h_gram, len(hs))

    @classmethod
    def from_pair(cls, pair: ToralPair) -> "QuadraticToralPair":
        return cls(decompose(pair))

    @property
    def pair(self) -> ToralPair:
        return self.datum.pair

    @property
    def alg(self) -> StructureAlgebra:
        return self.datum.pair.alg

    @property
    def roots(self) -> List[Root]:
        return self.datum.roots

    @property
    def nondegenerate_on_h(self) -> bool:
        return self.h_gram_rank == self.pair.dim

    def _require_h_nondegenerate(self):
        if not self.nondegenerate_on_h:
            raise DegenerateOnH("the form restricted to H is degenerate")


def _h_coeffs(q: QuadraticToralPair, alpha: Root) -> List[Fraction]:
    q._require_h_nondegenerate()
    return linalg.solve(q.h_gram, list(alpha), q.pair.dim)


def nu_inverse(q: QuadraticToralPair, alpha) -> Elem:
    """The element t_alpha of H with (t_alpha, h) = alpha(h) for all h in H."""
    c = _h_coeffs(q, Root(alpha))
    out = q.alg.zero()
    for ci, h in zip(c, q.pair.h_basis):
        out = out + ci * h
    return out


def root_pairing(q: QuadraticToralPair, alpha, beta) -> Fraction:
    a = _h_coeffs(q, Root(alpha))
    b = _h_coeffs(q, Root(beta))
    g = q.h_gram
    return sum((a[i] * g[i][j] * b[j] for i in range(len(a)) for j in range(len(b))), Fraction(0))


@dataclass
class TestPairWitness:
    __test__ = False  # not a pytest class

    root: Root
    degree: int
    x_plus: Elem
    x_minus: Elem
    product: Elem
    pairing: Optional[Fraction]
    path: str = ""

    @property
    def block(self) -> bool:
        return self.pairing == 1

    def to_dict(self) -> Dict:
        return {
            "root": str(self.root), "degree": self.degree,
            "x_plus": str(self.x_plus), "x_minus": str(self.x_minus),
            "product": str(self.product), "pairing": self.pairing,
            "block": self.block, "path": self.path,
        }


@dataclass
class Inconclusive:
    root: Root
    degree: int
    reason: str
    tried: int = 0

    def to_dict(self) -> Dict:
        return {"root": str(self.root), "degree": self.degree, "reason": self.reason, "tried": self.tried}


def verify_test_pair(q_or_pair, x_plus: Elem, x_minus: Elem) -> Optional[Elem]:
    """The product if (x_plus, x_minus) is a test-pair (nonzero product in H), else None."""
    pair = q_or_pair.pair if isinstance(q_or_pair, QuadraticToralPair) else q_or_pair
    p = x_plus * x_minus
    if not p or pair.h_coordinates(p) is None:
        return None
    return p


def _root_seed(datum: RootDatum, alpha: Root, b: int, seed: int) -> int:
    idx = datum.roots.index(alpha) * datum.alg.grading.modulus + b
    return seed ^ idx


def _random_combo(rng: random.Random, vecs: List[Elem], alg: StructureAlgebra) -> Elem:
    out = alg.zero()
    for v in vecs:
        c = rng.randint(-COEFF_RANGE, COEFF_RANGE)
        if c:
            out = out + c * v
    return out


def find_test_pair(
    q: Union[QuadraticToralPair, RootDatum],
    alpha,
    b: int,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    use_form: bool = True,
) -> Union[TestPairWitness, Inconclusive]:
    """Search for x_plus in A^alpha_b, x_minus in A^-alpha_-b with 0 != x_plus x_minus in H.

    Tries the form-guided pairs first (if the form is nondegenerate on H),
    then all basis pairs, then ``budget`` seeded random combinations. Every
    candidate is verified directly; a failed search is Inconclusive, never a
    proof of nonexistence.
    """
    datum = q.datum if isinstance(q, QuadraticToralPair) else q
    alg = datum.alg
    g = alg.grading
    alpha = Root(alpha)
    if alpha.is_zero:
        raise ValueError("test-pairs are only defined for nonzero roots")
    if alpha not in datum.per_degree.get(b, set()):
        raise ValueError(f"{alpha} is not a root of degree {b}")
    plus = datum.graded_pieces[(alpha, b)]
    minus = datum.graded_pieces.get((-alpha, g.neg(b)), [])
    has_form = alg.gram is not None and use_form
    if not minus:
        return Inconclusive(alpha, b, f"missing opposite root {-alpha} in degree {g.neg(b)}")

    def witness(u, v, path):
        p = verify_test_pair(datum.pair, u, v)
        if p is None:
            return None
        pairing = alg.form(u, v) if alg.gram is not None else None
        return TestPairWitness(alpha, b, u, v, p, pairing, path)

    tried = 0
    if has_form and isinstance(q, QuadraticToralPair) and q.nondegenerate_on_h:
        for u, v in itertools.product(plus, minus):
            if alg.form(u, v):
                tried += 1
                w = witness(u, v, "form")
                if w:
                    return w
    for u, v in itertools.product(plus, minus):
        tried += 1
        w = witness(u, v, "basis")
        if w:
            return w
    rng = random.Random(_root_seed(datum, alpha, b, seed))
    for _ in range(budget):
        u = _random_combo(rng, plus, alg)
        v = _random_combo(rng, minus, alg)
        tried += 1
        if u and v:
            w = witness(u, v, "random")
            if w:
                return w
    return Inconclusive(alpha, b, "no test-pair found within budget", tried)


def check_block_identity(q: QuadraticToralPair, w: TestPairWitness) -> CheckReport:
    """x_plus x_minus == (x_plus, x_minus) t_alpha, checked exactly."""
    q._require_h_nondegenerate()
    t = nu_inverse(q, w.root)
    pairing = q.alg.form(w.x_plus, w.x_minus)
    lhs = w.x_plus * w.x_minus
    rhs = pairing * t
    rep = CheckReport(subject={"algebra": q.alg.name or "?"})
    info = {"root": str(w.root), "t_alpha": str(t), "pairing": pairing}
    if lhs == rhs:
        rep.add("block_identity", PASS, elements=[str(w.x_plus), str(w.x_minus)], **info)
    else:
        rep.add("block_identity", FAIL,
                witness={"elements": [str(w.x_plus), str(w.x_minus)],
                         "lhs": str(lhs), "rhs": str(rhs)}, **info)
    return rep


def nonzero_root_degrees(datum: RootDatum) -> List[Tuple[int, Root]]:
    return [
        (b, a)
        for b in datum.alg.grading.elements()
        for a in sorted(datum.per_degree.get(b, ()), key=root_order)
        if not a.is_zero
    ]


def find_all_test_pairs(q, budget=DEFAULT_BUDGET, seed=DEFAULT_SEED):
    return [(b, a, find_test_pair(q, a, b, budget, seed)) for b, a in nonzero_root_degrees(q.datum)]


def check_E1(q: QuadraticToralPair, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
             found=None) -> CheckReport:
    rep = CheckReport(subject={"algebra": q.alg.name or "?"})
    found = find_all_test_pairs(q, budget, seed) if found is None else found
    witnesses = [w.to_dict() for _, _, w in found if isinstance(w, TestPairWitness)]
    missing = [w for _, _, w in found if isinstance(w, Inconclusive) and w.reason.startswith("missing")]
    open_ = [w.to_dict() for _, _, w in found if isinstance(w, Inconclusive) and not w.reason.startswith("missing")]
    if missing:
        rep.add("E1", FAIL, witness=missing[0].to_dict(), witnesses=witnesses, inconclusive=open_)
    elif open_:
        rep.add("E1", INCONCLUSIVE, witnesses=witnesses, inconclusive=open_)
    else:
        rep.add("E1", PASS, count=len(witnesses), witnesses=witnesses)
    return rep


def pairing_values(q: QuadraticToralPair) -> Set[Fraction]:
    return {root_pairing(q, a, b) for a in q.roots for b in q.roots}


def check_E2prime(q: QuadraticToralPair) -> CheckReport:
    q._require_h_nondegenerate()
    values = pairing_values(q)
    rep = CheckReport(subject={"algebra": q.alg.name or "?"})
    rep.add("E2'", PASS, count=len(q.roots) ** 2, values=sorted(values), finite=True)
    return rep


def _sample_block_values(q: QuadraticToralPair, budget: int, seed: int):
    """beta(x_plus x_minus) over sampled block test-pairs; returns (values, number of block pairs)."""
    alg = q.alg
    datum = q.datum
    g = alg.grading
    values: Set[Fraction] = set()
    found = 0
    for b in g.elements():
        for alpha in sorted(datum.per_degree.get(b, ()), key=root_order):
            plus = datum.graded_pieces[(alpha, b)]
            minus = datum.graded_pieces.get((-alpha, g.neg(b)), [])
            if not minus:
                continue
            rng = random.Random(_root_seed(datum, alpha, b, seed))
            candidates = list(itertools.product(plus, minus))
            candidates += [(_random_combo(rng, plus, alg), _random_combo(rng, minus, alg)) for _ in range(budget)]
            for u, v in candidates:
                if not u or not v:
                    continue
                pairing = alg.form(u, v)
                p = verify_test_pair(datum.pair, u, v)
                if p is None or not pairing:
                    continue
                coords = datum.pair.h_coordinates((1 / pairing) * p)
                found += 1
                for beta in datum.roots:
                    values.add(beta(coords))
    return values, found


def check_E2_sampled(q: QuadraticToralPair, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED) -> CheckReport:
    values, found = _sample_block_values(q, budget, seed)
    rep = CheckReport(subject={"algebra": q.alg.name or "?"})
    rep.add("E2_sampled", PASS, count=found, values=sorted(values), partial=True,
            verdict="finite so far", note="sampled block test-pairs only; the axiom quantifies over all of them")
    return rep


def check_E3(q: QuadraticToralPair) -> CheckReport:
    alg = q.alg
    n = alg.dim
    rep = CheckReport(subject={"algebra": alg.name or "?"})
    r = linalg.rank(alg.gram, n)
    if r == n:
        rep.add("E3_A", PASS, rank=r, det=linalg.det(alg.gram))
    else:
        k = alg.elem(linalg.nullspace(alg.gram, n)[0])
        rep.add("E3_A", FAIL, rank=r, witness={"kernel_vector": str(k)})
    m = q.pair.dim
    if q.h_gram_rank == m:
        rep.add("E3_H", PASS, rank=m, det=linalg.det(q.h_gram))
    else:
        c = linalg.nullspace(q.h_gram, m)[0]
        k = alg.zero()
        for ci, h in zip(c, q.pair.h_basis):
            k = k + ci * h
        rep.add("E3_H", FAIL, rank=q.h_gram_rank, witness={"kernel_vector": str(k)})
    return rep


@dataclass
class RootClassification:
    nonisotropic: Set[Root]
    isotropic: Set[Root]
    exact: bool


def classify_roots(q: QuadraticToralPair, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED) -> RootClassification:
    roots = q.roots
    if q.nondegenerate_on_h:
        nonis = {a for a in roots if any(root_pairing(q, a, b) != 0 for b in roots)}
        return RootClassification(nonis, set(roots) - nonis, True)
    products = [w.product for _, _, w in find_all_test_pairs(q, budget, seed) if isinstance(w, TestPairWitness)]
    nonis = set()
    for a in roots:
        for p in products:
            if a(q.pair.h_coordinates(p)) != 0:
                nonis.add(a)
                break
    return RootClassification(nonis, set(roots) - nonis, False)


@dataclass
class CoreResult:
    nonisotropic: Set[Root]
    core_basis: List[Elem]
    hc_basis: List[Elem]
    exact: bool = True

    @property
    def dim(self) -> int:
        return len(self.core_basis)


def generated_subalgebra(alg: StructureAlgebra, gens: List[Elem]) -> List[Elem]:
    """Row-reduced basis of the subalgebra generated by ``gens`` (span-closure fixed point)."""
    n = alg.dim
    basis = linalg.span_basis([g.dense() for g in gens if g], n)
    while True:
        elems = [alg.elem(v) for v in basis]
        prods = [(u * v).dense() for u in elems for v in elems]
        grown = linalg.span_basis(basis + prods, n)
        if len(grown) == len(basis):
            return [alg.elem(v) for v in grown]
        basis = grown


def compute_core(q: QuadraticToralPair, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED) -> CoreResult:
    cls = classify_roots(q, budget, seed)
    gens = [v for a in sorted(cls.nonisotropic, key=root_order) for v in q.datum.spaces[a]]
    core = generated_subalgebra(q.alg, gens)
    n = q.alg.dim
    hc = linalg.intersect([h.dense() for h in q.pair.h_basis], [c.dense() for c in core], n)
    return CoreResult(cls.nonisotropic, core, [q.alg.elem(v) for v in hc], cls.exact)


def _core_names(alg: StructureAlgebra, basis: List[Elem]) -> List[str]:
    names = []
    for i, v in enumerate(basis):
        if len(v.coeffs) == 1 and next(iter(v.coeffs.values())) == 1:
            names.append(alg.basis[next(iter(v.coeffs))])
        else:
            names.append(f"c{i + 1}")
    if len(set(names)) != len(names):
        names = [f"c{i + 1}" for i in range(len(basis))]
    return names


def core_pair(q: QuadraticToralPair, core: CoreResult) -> Optional[ToralPair]:
    """(A_c, H_c) as a fresh toral pair, or None when H_c = 0."""
    alg = q.alg
    sub, rows = subalgebra(alg, core.core_basis, _core_names(alg, core.core_basis),
                           name=f"core({alg.name})" if alg.name else "core")
    if not core.hc_basis:
        return None
    hs = [sub.elem(linalg.coordinates(rows, h.dense())) for h in core.hc_basis]
    return ToralPair(sub, hs)


def eaa_checks(q: QuadraticToralPair, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
               affine: bool = True, block: bool = True) -> CheckReport:
    """E1, E2' (or sampled E2 when the form on H is degenerate), and optionally E3."""
    rep = CheckReport(subject={"algebra": q.alg.name or "?"})
    found = find_all_test_pairs(q, budget, seed)
    rep.extend(check_E1(q, budget, seed, found))
    if q.nondegenerate_on_h:
        rep.extend(check_E2prime(q))
        if block:
            for _, _, w in found:
                if isinstance(w, TestPairWitness):
                    for c in check_block_identity(q, w).checks:
                        c.name = f"block_identity[{w.root}, b={w.degree}]"
                        rep.checks.append(c)
    else:
        rep.extend(check_E2_sampled(q, budget, seed))
    if affine:
        rep.extend(check_E3(q))
    return rep


def verify_core_pair(q: QuadraticToralPair, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED) -> CheckReport:
    """Re-run the extended-algebra axioms on (A_c, H_c) as a new pair."""
    core = compute_core(q, budget, seed)
    rep = CheckReport(subject={"algebra": q.alg.name or "?", "core_dim": core.dim})
    if not core.core_basis:
        rep.add("core_pair", PASS, vacuous=True, note="empty core: no non-isotropic roots")
        return rep
    try:
        pair = core_pair(q, core)
    except NotToral as exc:
        rep.add("core_pair", FAIL, witness={"error": str(exc)})
        return rep
    if pair is None:
        rep.add("core_pair", FAIL, witness={"error": "H_c = H ∩ A_c is zero"})
        return rep
    try:
        cq = QuadraticToralPair(decompose(pair))
    except (NotToral, AlgebraError) as exc:
        rep.add("core_pair", FAIL, witness={"error": str(exc)})
        return rep
    rep.add("core_pair", PASS, core=[str(v) for v in core.core_basis], H_c=[str(h) for h in core.hc_basis],
            roots=[str(r) for r in cq.roots])
    rep.extend(verify_toral(cq.datum), prefix="core.")
    rep.extend(eaa_checks(cq, budget, seed, affine=False, block=False), prefix="core.")
    return rep
