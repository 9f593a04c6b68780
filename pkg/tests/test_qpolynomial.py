"""
Polynomials in q and x: grammar, canonical printing, specialisation
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.numerics import ExactComplex
from src.qpolynomial import PolynomialSyntaxError, QPolynomial, format_polynomial, parse_polynomial


def test_parse_and_print_canonical_order():
    p = parse_polynomial("q*x + q^2*x^2")
    assert p.as_dict() == {(1, 1): 1, (2, 2): 1}
    assert format_polynomial(p) == "q^2*x^2 + q*x"


def test_parenthesised_products_expand():
    assert str(parse_polynomial("2*(q + 1)*x")) == "2*q*x + 2*x"
    assert str(parse_polynomial("(x + 1)*(x - 1)")) == "x^2 - 1"


def test_leading_minus_round_trips():
    p = parse_polynomial("-x + 3")
    assert str(p) == "-x + 3"
    assert parse_polynomial(str(p)) == p


def test_zero_polynomial_prints_zero():
    assert str(parse_polynomial("q - q")) == "0"
    assert parse_polynomial("q - q").is_zero()


@pytest.mark.parametrize("text, position", [
    ("q^", 2),
    ("q + * x", 4),
    ("q $ x", 2),
    ("x^q", 2),
    ("(q + 1", 6),
    ("", 0),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(PolynomialSyntaxError) as exc:
        parse_polynomial(text)
    assert exc.value.position == position


def test_specialize_substitutes_powers_of_q():
    p = parse_polynomial("q^2*x^2 + q*x")
    assert p.specialize(1) == {4: 1, 2: 1}
    assert p.degree_q_at(3) == 8
    assert p.leading_coefficient_at(0) == 1
    assert parse_polynomial("q*x^2 - q^3*x").specialize(3) == {7: 1, 6: -1}
    # top degrees cancel at n = 1
    assert parse_polynomial("q^2*x - q*x^2").specialize(1) == {}


def test_evaluate_and_at_power():
    p = parse_polynomial("q^2*x^2 + q*x")
    assert p.evaluate(2, 4) == ExactComplex(4 * 16 + 2 * 4)
    assert p.at_power(2, 1) == ExactComplex(20)
    assert p.at_power(ExactComplex(0, 1), 0) == ExactComplex(-1, 1)


def test_leading_monomial_prefers_x_degree():
    p = parse_polynomial("q^9*x + x^2")
    assert p.leading_monomial() == ((0, 2), 1)
    assert not p.is_q_only
    assert parse_polynomial("q^3 + 2").is_q_only


def test_extreme_coefficients_and_degrees_round_trip():
    p = QPolynomial.from_terms({(12, 0): 10 ** 6, (0, 12): -(10 ** 6), (6, 6): -1})
    assert format_polynomial(p) == "-1000000*x^12 - q^6*x^6 + 1000000*q^12"
    assert parse_polynomial(format_polynomial(p)) == p


terms = st.dictionaries(
    st.tuples(st.integers(0, 12), st.integers(0, 12)).filter(lambda e: e[0] + e[1] <= 12),
    st.integers(-10 ** 6, 10 ** 6).filter(lambda c: c != 0),
    max_size=12,
)


@settings(max_examples=200, deadline=None)
@given(terms)
def test_printed_form_parses_back(data):
    p = QPolynomial.from_terms(data)
    assert parse_polynomial(format_polynomial(p)) == p
