import pickle
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malcev_forge.algebra import AlgebraError, StructureAlgebra, format_terms, subalgebra
from malcev_forge.catalog import BUILTIN_NAMES, builtin
from malcev_forge.grading import GradingGroup

Z2 = GradingGroup.zp(2)


@st.composite
def graded_algebras(draw):
    """Random B-commutative Z2-graded algebras of dimension at most 4."""
    degrees = draw(st.lists(st.integers(0, 1), min_size=1, max_size=4))
    n = len(degrees)
    products = {}
    for i in range(n):
        for j in range(i, n):
            target = (degrees[i] + degrees[j]) % 2
            result = {}
            for k in range(n):
                if degrees[k] == target:
                    c = draw(st.integers(-2, 2))
                    if c:
                        result[f"x{k}"] = c
            if i == j and Z2.sign_commute(degrees[i], degrees[i]) == -1:
                result = {}
            products[(f"x{i}", f"x{j}")] = result
    return StructureAlgebra.from_table(Z2, [f"x{i}" for i in range(n)], degrees, products, bcommutative=True)


def homogeneous(alg, data):
    b = data.draw(st.sampled_from(sorted(set(alg.degrees))))
    coeffs = {i: data.draw(st.integers(-3, 3)) for i in alg.piece(b)}
    return alg.elem(coeffs), b


@settings(max_examples=80, deadline=None)
@given(graded_algebras(), st.data())
def test_grading_closure(alg, data):
    x, bx = homogeneous(alg, data)
    y, by = homogeneous(alg, data)
    p = x * y
    if p:
        assert p.degrees() == {Z2.add(bx, by)}


@settings(max_examples=80, deadline=None)
@given(graded_algebras(), st.data())
def test_bcommutativity_on_elements(alg, data):
    x, bx = homogeneous(alg, data)
    y, by = homogeneous(alg, data)
    assert x * y == Z2.sign_commute(bx, by) * (y * x)


def test_from_table_mirrors_products():
    alg, _ = builtin("sl2")
    h, e = alg.e("h"), alg.e("e")
    assert e * h == -2 * e
    assert alg.product(alg.index("f"), alg.index("e")) == {alg.index("h"): -1}


def test_from_table_rejects_inconsistent_orders():
    with pytest.raises(AlgebraError, match="inconsistent"):
        StructureAlgebra.from_table(
            GradingGroup.trivial(), ["a", "b"], [0, 0],
            {("a", "b"): {"a": 1}, ("b", "a"): {"a": 1}}, bcommutative=True)


def test_grading_violation_rejected():
    with pytest.raises(AlgebraError, match="grading violated"):
        StructureAlgebra.from_table(Z2, ["a", "x"], [0, 1], {("a", "x"): {"a": 1}})


def test_undeclared_name_rejected():
    with pytest.raises(AlgebraError, match="undeclared"):
        StructureAlgebra.from_table(GradingGroup.trivial(), ["a"], [0], {("a", "b"): {}})


def test_bcommutative_flag_checks_squares():
    with pytest.raises(AlgebraError, match="inconsistent"):
        StructureAlgebra.from_table(GradingGroup.trivial(), ["a"], [0], {("a", "a"): {"a": 1}},
                                    bcommutative=True)


def test_elem_arithmetic_and_format(m7):
    alg, _ = m7
    x = alg.elem({1: 2, 2: -1})
    assert str(x) == "2*e2 - e3"
    assert str(alg.zero()) == "0"
    assert (x - x) == alg.zero()
    assert not (x - x)
    assert x.is_homogeneous and x.degree == 0
    assert alg.e("e2") * alg.e("e5") == alg.e("e1")


def test_elem_pickles(m7):
    alg, _ = m7
    x = alg.elem({0: F(1, 2), 6: 3})
    y = pickle.loads(pickle.dumps(x))
    assert y.coeffs == x.coeffs


def test_form_and_left_matrix(m7):
    alg, _ = m7
    assert alg.form(alg.e("e1"), alg.e("e1")) == 2
    assert alg.form(alg.e("e2"), alg.e("e5")) == 1
    lm = alg.left_matrix(alg.e("e1"))
    assert [lm[i][i] for i in range(7)] == [0, 2, 2, 2, -2, -2, -2]


def test_subalgebra_of_sl2_borel():
    alg, _ = builtin("sl2")
    sub, rows = subalgebra(alg, [alg.e("h"), alg.e("e")], ["h", "e"])
    assert sub.dim == 2
    assert sub.e("h") * sub.e("e") == 2 * sub.e("e")
    assert sub.gram == ((2, 0), (0, 0))
    with pytest.raises(AlgebraError):
        subalgebra(alg, [alg.e("e"), alg.e("f")])


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtins_are_bcommutative(name):
    alg, _ = builtin(name)
    assert alg.bcommutativity_witness() is None


def test_format_terms():
    assert format_terms([(F(1), "a"), (F(-1), "b"), (F(1, 2), "c")]) == "a - b + 1/2*c"
