from fractions import Fraction as F

import pytest

from malcev_forge.algebra import StructureAlgebra
from malcev_forge.catalog import BUILTIN_NAMES, builtin
from malcev_forge.grading import GradingGroup
from malcev_forge.toral import (
    NotSplit,
    NotToral,
    Root,
    ToralPair,
    check_partial_grading,
    check_root_symmetry,
    decompose,
    root_support,
    verify_toral,
)

TRIVIAL = GradingGroup.trivial()


def three_dim(products):
    alg = StructureAlgebra.from_table(TRIVIAL, ["h", "a", "b"], [0, 0, 0], products, bcommutative=True)
    return ToralPair(alg, [alg.e("h")])


def test_m7_decomposition(m7):
    alg, pair = m7
    datum = decompose(pair)
    alpha = Root([2])
    assert datum.roots == [Root([0]), alpha, -alpha]
    assert datum.dims() == {Root([0]): 1, alpha: 3, -alpha: 3}
    assert [str(v) for v in datum.spaces[alpha]] == ["e2", "e3", "e4"]
    assert [str(v) for v in datum.spaces[-alpha]] == ["e5", "e6", "e7"]


def test_osp12_roots_by_degree():
    _, pair = builtin("osp12")
    datum = decompose(pair)
    assert root_support(datum, 0) == {Root([0]), Root([2]), Root([-2])}
    assert root_support(datum, 1) == {Root([1]), Root([-1])}


def test_irrational_eigenvalue_is_not_split():
    pair = three_dim({("h", "a"): {"b": 1}, ("h", "b"): {"a": 2}})
    with pytest.raises(NotSplit, match="not split"):
        decompose(pair)


def test_nilpotent_action_is_not_semisimple():
    pair = three_dim({("h", "a"): {"b": 1}})
    with pytest.raises(NotSplit, match="not semisimple"):
        decompose(pair)


def test_toral_pair_validation():
    alg, _ = builtin("sl2")
    with pytest.raises(NotToral):
        ToralPair(alg, [])
    with pytest.raises(NotToral, match="dependent"):
        ToralPair(alg, [alg.e("h"), 2 * alg.e("h")])
    with pytest.raises(NotToral, match="not a subalgebra"):
        ToralPair(alg, [alg.e("e"), alg.e("f")])
    osp, _ = builtin("osp12")
    with pytest.raises(NotToral, match="degree 0"):
        ToralPair(osp, [osp.e("x")])


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_h_is_abelian_on_builtins(name):
    # H·H = 0 for every declared toral subalgebra
    alg, pair = builtin(name)
    if pair is None:
        pytest.skip("no declared H")
    for h in pair.h_basis:
        for k in pair.h_basis:
            assert not h * k
    rep = verify_toral(decompose(pair))
    assert rep.ok, rep.to_text()


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_components_reassemble(name):
    alg, pair = builtin(name)
    datum = decompose(pair)
    x = alg.elem([F(i + 1, 2) for i in range(alg.dim)])
    parts = datum.components(x)
    total = alg.zero()
    for r, part in parts.items():
        total = total + part
        for h, coeff in zip(pair.h_basis, range(pair.dim)):
            assert h * part == r([1 if j == coeff else 0 for j in range(pair.dim)]) * part
    assert total == x


def test_m7_partial_grading():
    _, pair = builtin("m7")
    rep = check_partial_grading(decompose(pair))
    assert rep.ok
    assert rep["hypothesis"].details["identity"] == "sagle"
    # A^a A^a lands in A^{-a} here (e2 e3 = 2 e7)
    assert rep["cell((2),(2))"].details["targets"] == ["(-2)", "(4)"]


def test_root_symmetry_report():
    _, pair = builtin("osp12")
    assert check_root_symmetry(decompose(pair)).ok


def test_root_arithmetic():
    a = Root([2, F(1, 2)])
    assert -a == Root([-2, F(-1, 2)])
    assert (a + a) == a.scale(2)
    assert a([1, 2]) == 3
    assert str(a) == "(2, 1/2)"
