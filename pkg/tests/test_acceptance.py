"""Acceptance gate: one test group per criterion, summarised as one line each.

Run with ``pytest tests/test_acceptance.py -v`` (the summary lines appear at the
end of the session) or directly with ``python3 tests/test_acceptance.py``.
"""

import io
import itertools
import json
import random
import re
import time
from fractions import Fraction as F

import pytest

from malcev_forge.catalog import BUILTIN_NAMES, builtin
from malcev_forge.cli import run
from malcev_forge.algebra import AlgebraError
from malcev_forge.eaa import QuadraticToralPair, check_block_identity, eaa_checks, find_test_pair
from malcev_forge.grading import GradingGroup
from malcev_forge.identities import check_identity, malcev_identity_for
from malcev_forge.loop import (
    LoopAlgebra,
    check_loop_identity,
    make_cocycle,
    malcev_obstruction,
    predicted_loop_verdict,
)
from malcev_forge.toral import Root, check_root_symmetry, decompose

CRITERIA = {
    1: "decompose m7: roots {0, a, -a}, a(e1) = 2, dims (1, 3, 3), A^a = <e2, e3, e4>, < 1 s",
    2: "m7 passes sagle on 2401 quadruples, fails jacobi with printed residual; J(e2,e3,e5) = -6e3, < 5 s",
    3: "form m7-paper fails invariance at (e1,e2,e5) with 2 vs 1; form m7 passes all four checks",
    4: "eaa m7: E1 witnesses for +-a, E2' values {0, 2, -2}, E3; core dim 7, H_c = <e1>, < 1 s",
    5: "block identity holds for (e2, e5) on m7 and fails on m7-paper",
    6: "n = 1, k = 1: tilde m7 passes sagle; hat m7 fails with a d element; hat sl2 passes jacobi; < 120 s",
    7: "obstruction predictions from the stated conditions match direct verdicts, k in {0, 1}, q in {1, 2}",
    8: "affinize m7 hat --check eaa passes with hypothesis, E1 incl. 0 + sigma, E2' = base set, blocks; < 10 s",
    9: "criteria 2 and 6 give byte-identical JSON under --threads 1 and --threads 8",
    10: "property suites: sampled vs exhaustive, grading closure, sign table, H.H = 0, R_-b = -R_b",
}


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue()


def cli_json(*argv, threads="1"):
    code, out = cli(*argv, "--format", "json", "--threads", threads)
    return code, json.loads(out), out


def check(rep, name):
    return next(c for c in rep["checks"] if c["name"] == name)


# 1 ---------------------------------------------------------------------------

def test_criterion_1_decompose_m7():
    t = time.perf_counter()
    code, rep, _ = cli_json("decompose", "builtin:m7")
    elapsed = time.perf_counter() - t
    assert code == 0
    roots = {r["root"]: r for r in check(rep, "roots")["details"]["roots"]}
    assert set(roots) == {"(0)", "(2)", "(-2)"}
    assert [roots[r]["dim"] for r in ("(0)", "(2)", "(-2)")] == [1, 3, 3]
    assert roots["(2)"]["basis"] == ["e2", "e3", "e4"]
    assert roots["(-2)"]["basis"] == ["e5", "e6", "e7"]
    assert elapsed < 1.0


# 2 ---------------------------------------------------------------------------

M7_UPPER = {
    (1, 2): {2: 2}, (1, 3): {3: 2}, (1, 4): {4: 2}, (1, 5): {5: -2}, (1, 6): {6: -2}, (1, 7): {7: -2},
    (2, 3): {7: 2}, (2, 4): {6: -2}, (2, 5): {1: 1}, (3, 4): {5: 2}, (3, 6): {1: 1}, (4, 7): {1: 1},
    (5, 6): {4: -2}, (5, 7): {3: 2}, (6, 7): {2: -2},
}


def table_mul(u, v):
    out = {}
    for i, a in u.items():
        for j, b in v.items():
            prod, sign = (M7_UPPER.get((i, j), {}), 1) if i < j else (M7_UPPER.get((j, i), {}), -1)
            for k, c in prod.items():
                out[k] = out.get(k, 0) + sign * a * b * c
    return {k: c for k, c in out.items() if c}


def table_jacobian(x, y, z):
    total = {}
    for u, v, w in ((x, y, z), (z, x, y), (y, z, x)):
        for k, c in table_mul(table_mul({u: 1}, {v: 1}), {w: 1}).items():
            total[k] = total.get(k, 0) + c
    return {k: c for k, c in total.items() if c}


def test_criterion_2_malcev_not_lie():
    t = time.perf_counter()
    code, rep, _ = cli_json("identities", "builtin:m7", "--identity", "sagle", "--mode", "exhaustive")
    assert code == 0
    assert check(rep, "sagle")["details"]["tuples"] == 2401
    code, rep, _ = cli_json("identities", "builtin:m7", "--identity", "jacobi")
    elapsed = time.perf_counter() - t
    assert code == 1
    w = check(rep, "jacobi")["witness"]
    x, y, z = (int(e[1:]) for e in w["elements"])
    expected = " + ".join(f"{c}*e{k}" for k, c in sorted(table_jacobian(x, y, z).items()))
    assert w["residual"] == expected
    assert table_jacobian(2, 3, 5) == {3: -6}
    alg, _ = builtin("m7")
    from malcev_forge.identities import jacobian

    assert jacobian(alg, alg.e("e2"), alg.e("e3"), alg.e("e5")) == -6 * alg.e("e3")
    assert elapsed < 5.0


# 3 ---------------------------------------------------------------------------

def test_criterion_3_form_defect():
    code, rep, _ = cli_json("form", "builtin:m7-paper")
    assert code == 1
    inv = check(rep, "invariant")
    assert inv["status"] == "fail"
    assert inv["witness"]["elements"] == ["e1", "e2", "e5"]
    assert (inv["witness"]["lhs_value"], inv["witness"]["rhs_value"]) == ("2", "1")
    code, rep, _ = cli_json("form", "builtin:m7")
    assert code == 0
    assert [c["name"] for c in rep["checks"]] == ["invariant", "b_symmetric", "b_graded", "nondegenerate"]
    assert all(c["status"] == "pass" for c in rep["checks"])


# 4 ---------------------------------------------------------------------------

def test_criterion_4_eaa_and_core():
    t = time.perf_counter()
    code, rep, _ = cli_json("eaa", "builtin:m7")
    assert code == 0
    witnesses = check(rep, "E1")["details"]["witnesses"]
    assert sorted(w["root"] for w in witnesses) == ["(-2)", "(2)"]
    alg, pair = builtin("m7")
    for w in witnesses:
        xp, xm = alg.e(w["x_plus"]), alg.e(w["x_minus"])
        p = xp * xm
        assert p and pair.h_coordinates(p) is not None and str(p) == w["product"]
    assert sorted(F(v) for v in check(rep, "E2'")["details"]["values"]) == [-2, 0, 2]
    assert check(rep, "E3_A")["status"] == "pass" and check(rep, "E3_H")["status"] == "pass"
    code, rep, _ = cli_json("core", "builtin:m7")
    elapsed = time.perf_counter() - t
    assert code == 0
    core = check(rep, "core")["details"]
    assert core["dim"] == 7 and core["H_c"] == ["e1"]
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert elapsed < 1.0


# 5 ---------------------------------------------------------------------------

def test_criterion_5_block_identity():
    results = {}
    for name in ("m7", "m7-paper"):
        alg, pair = builtin(name)
        q = QuadraticToralPair(decompose(pair))
        w = find_test_pair(q, Root([2]), 0)
        assert (str(w.x_plus), str(w.x_minus)) == ("e2", "e5")
        results[name] = check_block_identity(q, w)["block_identity"]
    assert results["m7"].status == "pass" and results["m7"].details["t_alpha"] == "e1"
    assert results["m7-paper"].status == "fail" and results["m7-paper"].details["t_alpha"] == "2*e1"


# 6 ---------------------------------------------------------------------------

CRIT6 = [
    ("affinize", "builtin:m7", "--flavor", "tilde", "--rank", "1", "--box", "1", "--check", "sagle"),
    ("affinize", "builtin:m7", "--flavor", "hat", "--rank", "1", "--box", "1", "--check", "sagle"),
    ("affinize", "builtin:sl2", "--flavor", "hat", "--rank", "1", "--box", "1", "--check", "jacobi"),
]
_crit6_time = {}


def _timed(argv):
    t = time.perf_counter()
    result = cli_json(*argv)
    _crit6_time[argv] = time.perf_counter() - t
    return result


def test_criterion_6a_tilde_m7_sagle_passes():
    code, rep, _ = _timed(CRIT6[0])
    c = rep["checks"][0]
    assert c["details"]["basis_size"] == 22
    assert code == 0, f"tilde sagle: {c['status']} with witness {c.get('witness')}"


def test_criterion_6b_hat_m7_sagle_fails_with_d():
    code, rep, _ = _timed(CRIT6[1])
    assert code == 1
    assert any(e.startswith("d") for e in rep["checks"][0]["witness"]["elements"])


def test_criterion_6c_hat_sl2_jacobi_passes():
    code, rep, _ = _timed(CRIT6[2])
    assert code == 0


def test_criterion_6d_total_runtime():
    for argv in CRIT6:
        if argv not in _crit6_time:
            _timed(argv)
    assert sum(_crit6_time[a] for a in CRIT6) < 120.0


# 7 ---------------------------------------------------------------------------

def _prediction_mismatches(exact):
    bad = []
    for name in BUILTIN_NAMES:
        alg, _ = builtin(name)
        ob = malcev_obstruction(alg)
        for q in (((1,),), ((2,),)):
            for flavor in ("tilde", "hat"):
                la = LoopAlgebra(alg, make_cocycle(q), flavor)
                for k in (0, 1):
                    direct = check_loop_identity(la, malcev_identity_for(alg.grading), k).ok
                    if direct != predicted_loop_verdict(ob, flavor, k, exact=exact):
                        bad.append((name, flavor, q[0][0], k, direct))
    return bad


def test_criterion_7_obstruction_consistency():
    bad = _prediction_mismatches(exact=False)
    assert not bad, f"stated-condition predictions disagree with direct verdicts (name, flavor, q, k, direct): {bad}"


def test_criterion_7b_exact_obstruction_consistency():
    assert _prediction_mismatches(exact=True) == []


# 8 ---------------------------------------------------------------------------

def test_criterion_8_hat_eaa_instance():
    t = time.perf_counter()
    code, rep, _ = cli_json("affinize", "builtin:m7", "--flavor", "hat", "--rank", "1", "--box", "1",
                            "--check", "eaa")
    elapsed = time.perf_counter() - t
    assert code == 0
    hyp = check(rep, "hypothesis")["details"]
    assert hyp["A00_equals_H"] and hyp["form_nondegenerate_on_A0"]
    seen = {(w["alpha"], w["sigma"][0]) for w in check(rep, "E1")["details"]["witnesses"]}
    expected = {(a, s) for a in ("(0)", "(2)", "(-2)") for s in (-1, 0, 1)} - {("(0)", 0)}
    assert seen == expected
    e2 = check(rep, "E2'")["details"]
    assert e2["values"] == e2["base_values"] == ["-2", "0", "2"]
    assert check(rep, "E3_blocks")["status"] == "pass"
    assert elapsed < 10.0


# 9 ---------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ("identities", "builtin:m7", "--identity", "sagle", "--mode", "exhaustive"),
    ("identities", "builtin:m7", "--identity", "jacobi"),
    *CRIT6,
])
def test_criterion_9_thread_independence(argv):
    _, _, one = cli_json(*argv, threads="1")
    _, _, eight = cli_json(*argv, threads="8")
    assert one == eight


# 10 --------------------------------------------------------------------------

def eaa_passes(datum):
    if datum.alg.gram is None:
        return False
    try:
        return eaa_checks(QuadraticToralPair(datum)).ok
    except AlgebraError:
        return False


def test_criterion_10_property_suites():
    rng = random.Random(0)
    eaa_passing = []
    for name in BUILTIN_NAMES:
        alg, pair = builtin(name)
        for ident in ("jacobi", "super_jacobi", "sagle", "super_sagle"):
            ex = check_identity(alg, ident).ok
            sa = check_identity(alg, ident, mode="sampled").ok
            assert not (ex and not sa), (name, ident)
        for _ in range(50):
            bx, by = rng.choice(sorted(set(alg.degrees))), rng.choice(sorted(set(alg.degrees)))
            x = alg.elem({i: rng.randint(-2, 2) for i in alg.piece(bx)})
            y = alg.elem({i: rng.randint(-2, 2) for i in alg.piece(by)})
            p = x * y
            assert not p or p.degrees() == {alg.grading.add(bx, by)}
        if pair is not None:
            assert all(not h * k for h in pair.h_basis for k in pair.h_basis)
            datum = decompose(pair)
            if eaa_passes(datum):
                eaa_passing.append(name)
                assert check_root_symmetry(datum).ok, name
    for g in (GradingGroup.trivial(), GradingGroup.zp(2)):
        for a, b in itertools.product(g.elements(), repeat=2):
            expected = -1 if g.is_trivial else -((-1) ** (a * b))
            assert g.sign_commute(a, b) == expected
    assert {"m7", "sl2"} <= set(eaa_passing)


def summary_lines(outcomes):
    """One line per criterion from {test name: passed}."""
    by_criterion = {}
    for test, ok in outcomes.items():
        m = re.match(r"test_criterion_(\d+)[a-z]?_", test)
        if m:
            by_criterion.setdefault(int(m.group(1)), []).append(ok)
    lines = []
    for n, text in CRITERIA.items():
        results = by_criterion.get(n)
        status = "NOT RUN" if not results else "PASS" if all(results) else "FAIL"
        lines.append(f"criterion {n:>2}: {status:<7} {text}")
    return lines


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
