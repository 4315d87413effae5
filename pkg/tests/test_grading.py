import itertools

import pytest

from malcev_forge.grading import GradingGroup, sign_commute


def test_trivial_group_conventions():
    g = GradingGroup.trivial()
    assert g.order(0) == 1
    assert g.epsilon(0) == -1
    assert sign_commute(g, 0, 0) == -1


def test_z2_examples():
    g = GradingGroup.zp(2)
    assert sign_commute(g, 1, 1) == 1
    assert sign_commute(g, 0, 1) == -1
    assert sign_commute(g, 0, 0) == -1


@pytest.mark.parametrize("a,b", list(itertools.product((0, 1), repeat=2)))
def test_sign_reconciliation_z2(a, b):
    # epsilon(a*b) agrees with super-anticommutativity xy = -(-1)^{|x||y|} yx
    g = GradingGroup.zp(2)
    assert g.epsilon(g.mul(a, b)) == -((-1) ** (a * b))


def test_sign_reconciliation_trivial():
    g = GradingGroup.trivial()
    assert [g.sign_commute(a, b) for a in g.elements() for b in g.elements()] == [-1]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_zp_orders(p):
    g = GradingGroup.zp(p)
    assert g.order(0) == 1
    assert all(g.order(b) == p for b in range(1, p))


def test_parse_and_names():
    assert GradingGroup.parse("trivial").is_trivial
    assert GradingGroup.parse("Z2").modulus == 2
    assert GradingGroup.parse("Zp:3").modulus == 3
    with pytest.raises(ValueError):
        GradingGroup.parse("Z4")
    with pytest.raises(ValueError):
        GradingGroup.zp(2).check(2)
