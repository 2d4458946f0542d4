from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confbetti.algebra import (
    Degree,
    Derivation,
    GradedAlgebra,
    apply_derivation,
    degree_of,
    divide_by_generator,
    multiply,
)
from confbetti.errors import UsageError
from confbetti.model import torus_model

import _oracles


@pytest.fixture(scope="module")
def omega():
    return torus_model().algebra


@pytest.fixture(scope="module")
def g(omega):
    return omega.gens()


def test_odd_generators_anticommute(omega, g):
    assert g["v_a"] * g["v_b"] == omega.parse("v_a*v_b")
    assert g["v_b"] * g["v_a"] == -omega.parse("v_a*v_b")


def test_odd_square_is_zero(g):
    assert (g["v_a"] * g["v_a"]).is_zero()
    assert (g["w_ab"] ** 2).is_zero()


def test_even_generators_commute_and_coefficients_multiply(omega, g):
    assert (2 * g["v_1"]) * (3 * g["v_1"] * g["v_ab"]) == 6 * omega.parse("v_1^2*v_ab")


def test_mixed_algebras_rejected(g):
    other = GradedAlgebra([("x", 1)])
    with pytest.raises(UsageError):
        multiply(g["v_a"], other.gen("x"))
    with pytest.raises(UsageError):
        g["v_a"] + other.gen("x")


def test_degree_of():
    alg = torus_model().algebra
    assert degree_of(alg.parse("v_1*v_ab")) == 2
    assert degree_of(alg.parse("v_1 + v_a")) is Degree.INHOMOGENEOUS
    assert degree_of(alg.zero()) is Degree.ANY


def test_torus_differential_examples(omega):
    D = torus_model().differential
    assert D(omega.parse("w_1")) == omega.parse("v_1^2")
    assert D(omega.parse("v_a*v_b")).is_zero()
    expected = omega.parse("v_1^2*w_ab - 2*v_1*v_ab*w_1 - 2*v_a*v_b*w_1")
    assert D(omega.parse("w_1*w_ab")) == expected


def test_word_oracle_reproduces_leibniz_example(omega):
    D = torus_model().differential
    images = {k: img.terms for k, img in D.images.items()}
    x = omega.parse("w_1*w_ab")
    assert _oracles.derive(images, x) == D(x).terms


def test_parse_order_matters_for_odd_factors(omega):
    assert omega.parse("v_b*v_a") == -omega.parse("v_a*v_b")
    assert omega.parse("1/2*v_1 - 3") == Fraction(1, 2) * omega.gen("v_1") - 3


def test_derivation_rejects_wrong_degree():
    alg = GradedAlgebra([("x", 1), ("y", 2)])
    with pytest.raises(UsageError):
        Derivation(alg, {"x": "x"})


def test_divide_by_generator(omega):
    x = omega.parse("2*v_1^2*v_a + v_1*w_b")
    assert divide_by_generator(x, "v_1") == omega.parse("2*v_1*v_a + w_b")
    with pytest.raises(UsageError):
        divide_by_generator(omega.parse("v_a"), "v_1")


def test_equality_is_structural(omega):
    a = omega.parse("v_a*v_b + w_a")
    b = omega.parse("w_a - v_b*v_a")
    assert a == b and hash(a) == hash(b)
    assert (a - b).terms == {}


# -- properties ------------------------------------------------------------

def monomials(alg, max_exp=2):
    parts = [st.integers(0, 1) if gen.is_odd else st.integers(0, max_exp) for gen in alg.generators]
    return st.tuples(*parts)


def elements(alg, max_terms=3):
    return st.lists(
        st.tuples(monomials(alg), st.integers(-3, 3)), min_size=0, max_size=max_terms
    ).map(lambda ts: sum((alg.monomial(m, c) for m, c in ts), alg.zero()))


def homogeneous(alg):
    return monomials(alg).map(lambda m: alg.monomial(m))


OMEGA = torus_model().algebra


@settings(max_examples=150, deadline=None)
@given(elements(OMEGA), elements(OMEGA), elements(OMEGA))
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=100, deadline=None)
@given(elements(OMEGA))
def test_unital(a):
    one = OMEGA.one()
    assert one * a == a == a * one


@settings(max_examples=150, deadline=None)
@given(homogeneous(OMEGA), homogeneous(OMEGA))
def test_graded_commutative(a, b):
    da, db = degree_of(a), degree_of(b)
    sign = -1 if (da * db) % 2 else 1
    assert a * b == sign * (b * a)


@settings(max_examples=150, deadline=None)
@given(elements(OMEGA), elements(OMEGA))
def test_product_matches_word_oracle(a, b):
    assert (a * b).terms == _oracles.mul(a, b)


@settings(max_examples=150, deadline=None)
@given(elements(OMEGA))
def test_derivation_matches_word_oracle(x):
    D = torus_model().differential
    images = {k: img.terms for k, img in D.images.items()}
    assert D(x).terms == _oracles.derive(images, x)


@settings(max_examples=100, deadline=None)
@given(homogeneous(OMEGA))
def test_derivation_raises_degree_by_one(x):
    y = apply_derivation(torus_model().differential, x)
    assert y.is_zero() or degree_of(y) == degree_of(x) + 1


@settings(max_examples=100, deadline=None)
@given(homogeneous(OMEGA), homogeneous(OMEGA))
def test_leibniz_on_products(x, y):
    D = torus_model().differential
    sign = -1 if degree_of(x) % 2 else 1
    assert D(x * y) == D(x) * y + sign * (x * D(y))


def test_dd_zero_on_all_small_monomials():
    model = torus_model()
    alg = model.algebra
    D = model.differential
    for m in _oracles.brute_slice_upto(alg, max_degree=12, max_weight=10):
        x = alg.monomial(m)
        assert D(D(x)).is_zero(), alg.mono_str(m)
