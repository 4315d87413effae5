from fractions import Fraction as F

import pytest

from malcev_forge.algebra import AlgebraError
from malcev_forge.catalog import BUILTIN_NAMES, builtin
from malcev_forge.eaa import (
    Inconclusive,
    QuadraticToralPair,
    TestPairWitness,
    check_block_identity,
    check_E1,
    check_E2prime,
    check_E2_sampled,
    check_E3,
    compute_core,
    core_pair,
    eaa_checks,
    find_test_pair,
    nu_inverse,
    pairing_values,
    root_pairing,
    verify_core_pair,
)
from malcev_forge.toral import Root, check_root_symmetry, decompose


def qpair(name):
    return QuadraticToralPair(decompose(builtin(name)[1]))


def test_nu_inverse_m7_vs_m7_paper():
    # t_alpha solves (t_alpha, h) = alpha(h); alpha(e1) = 2
    assert str(nu_inverse(qpair("m7"), [2])) == "e1"
    assert str(nu_inverse(qpair("m7-paper"), [2])) == "2*e1"


@pytest.mark.parametrize("name", ["m7", "m7-paper", "sl2", "osp12"])
def test_nu_consistency(name):
    q = qpair(name)
    for a in q.roots:
        t = nu_inverse(q, a)
        for i, h in enumerate(q.pair.h_basis):
            assert q.alg.form(t, h) == a[i]
        for b in q.roots:
            assert root_pairing(q, a, b) == q.alg.form(t, nu_inverse(q, b))


def test_test_pair_m7():
    w = find_test_pair(qpair("m7"), [2], 0)
    assert isinstance(w, TestPairWitness)
    assert (str(w.x_plus), str(w.x_minus), str(w.product)) == ("e2", "e5", "e1")
    assert w.block


def test_block_identity_m7_and_m7_paper():
    for name, ok in (("m7", True), ("m7-paper", False)):
        q = qpair(name)
        w = find_test_pair(q, [2], 0)
        rep = check_block_identity(q, w)
        assert rep.ok is ok
    bad = check_block_identity(qpair("m7-paper"), find_test_pair(qpair("m7-paper"), [2], 0))["block_identity"]
    assert (bad.witness["lhs"], bad.witness["rhs"]) == ("e1", "2*e1")


def test_pairing_values():
    assert pairing_values(qpair("m7")) == {F(0), F(2), F(-2)}
    assert pairing_values(qpair("m7-paper")) == {F(0), F(4), F(-4)}
    assert pairing_values(qpair("osp12")) == {F(0), F(1, 2), F(-1, 2), F(1), F(-1), F(2), F(-2)}


@pytest.mark.parametrize("name", ["m7", "sl2", "osp12"])
def test_eaa_axioms_pass(name):
    rep = eaa_checks(qpair(name))
    assert rep.ok, rep.to_text()


@pytest.mark.parametrize("name", [n for n in BUILTIN_NAMES if n != "abelian2"])
def test_root_symmetry_on_eaa_builtins(name):
    # R_{-b} = -R_b whenever E1 holds
    q = qpair(name)
    if check_E1(q).ok:
        assert check_root_symmetry(q.datum).ok


def test_abelian_has_degenerate_form():
    q = qpair("abelian2")
    assert not q.nondegenerate_on_h
    assert check_E3(q)["E3_A"].status == "fail"
    rep = check_E2_sampled(q)
    assert rep["E2_sampled"].details["partial"] is True
    with pytest.raises(AlgebraError):
        nu_inverse(q, [0])


def test_e2prime_value_set_m7():
    rep = check_E2prime(qpair("m7"))
    assert set(rep["E2'"].details["values"]) == {F(0), F(2), F(-2)}


def test_missing_opposite_root_is_inconclusive():
    from malcev_forge.algebra import StructureAlgebra
    from malcev_forge.grading import GradingGroup
    from malcev_forge.toral import ToralPair

    alg = StructureAlgebra.from_table(
        GradingGroup.trivial(), ["h", "e"], [0, 0], {("h", "e"): {"e": 1}},
        gram=[[1, 0], [0, 1]], bcommutative=True)
    q = QuadraticToralPair(decompose(ToralPair(alg, [alg.e("h")])))
    w = find_test_pair(q, [1], 0)
    assert isinstance(w, Inconclusive) and "missing opposite root" in w.reason
    assert check_E1(q)["E1"].status == "fail"


def test_core_m7_and_idempotence():
    q = qpair("m7")
    core = compute_core(q)
    assert core.dim == 7
    assert [str(h) for h in core.hc_basis] == ["e1"]
    assert verify_core_pair(q).ok
    # the core of the core is itself
    inner = QuadraticToralPair(decompose(core_pair(q, core)))
    assert compute_core(inner).dim == core.dim


def test_core_of_abelian_is_empty():
    q = qpair("abelian2")
    assert compute_core(q).dim == 0
    assert verify_core_pair(q).ok
