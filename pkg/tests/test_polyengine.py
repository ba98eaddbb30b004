import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassres.errors import DivisionError
from grassres.polyengine import (Delta, Eps, Monomial, Pi, Polynomial, Rho, YInv, divide_out,
                                 evaluate, evaluate_mod_p, parse, partial_derivative, substitute)

VARS = [Pi("12"), Pi("34"), Rho("12", "34"), Eps("13"), Delta("12", "13"), YInv("12", "24")]

monomials = st.lists(st.tuples(st.sampled_from(VARS), st.integers(1, 3)), max_size=3).map(Monomial)
polys = st.lists(st.tuples(monomials, st.integers(-5, 5)), max_size=5).map(
    lambda ts: sum((Polynomial.monomial(m, c) for m, c in ts), Polynomial()))
points = st.fixed_dictionaries({v: st.integers(-4, 4) for v in VARS})


@given(polys)
def test_str_parse_roundtrip(p):
    assert parse(str(p)) == p


@given(polys, polys, points)
def test_evaluation_is_a_ring_homomorphism(p, q, pt):
    assert evaluate(p + q, pt) == evaluate(p, pt) + evaluate(q, pt)
    assert evaluate(p * q, pt) == evaluate(p, pt) * evaluate(q, pt)
    assert evaluate_mod_p(p * q, pt, 7) == evaluate(p, pt) * evaluate(q, pt) % 7


@given(polys, polys)
def test_ring_laws(p, q):
    assert p + q == q + p
    assert p * q == q * p
    assert (p - p).is_zero()


@given(polys, polys, st.sampled_from(VARS))
def test_leibniz(p, q, v):
    d = partial_derivative
    assert d(p * q, v) == d(p, v) * q + p * d(q, v)


@settings(max_examples=50)
@given(polys, points)
def test_substitute_constants_matches_evaluate(p, pt):
    assert substitute(p, pt) == Polynomial.const(evaluate(p, pt))


def test_divide_out():
    x, y = Polynomial.var(Pi("12")), Polynomial.var(Pi("34"))
    mon = Monomial([(Pi("12"), 1)])
    assert divide_out(x * x * y + x, mon) == x * y + 1
    with pytest.raises(DivisionError):
        divide_out(y, mon)


def test_variable_names():
    assert str(Rho("34", "12")) == "x[12,34]"
    assert str(Eps("13")) == "e[13]"
    assert str(YInv("12", "24")) == "y[12,24]"
