"""
Exact/float scalars, chordal metric, literal parsing and formatting
"""
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian_rationals, nonzero_gaussian_rationals
from src.numerics import (
    INFINITY,
    ExactComplex,
    Finite,
    FloatComplex,
    PrecisionMismatchError,
    agreed_digits,
    chordal_distance,
    chordal_distance_sq,
    decimal_digits,
    ext_div,
    float_context,
    format_ext,
    format_scalar,
    parse_complex,
    parse_ext,
)


def test_exact_arithmetic():
    x = ExactComplex(1, 2)
    y = ExactComplex(3, -1)
    assert x * y == ExactComplex(5, 5)
    assert (x * y) / y == x
    assert x - 1 == ExactComplex(0, 2)
    assert 2 - x == ExactComplex(1, -2)
    assert x ** -1 == ExactComplex(Fraction(1, 5), Fraction(-2, 5))
    assert x.abs_sq() == 5
    assert x.conjugate() == ExactComplex(1, -2)


@settings(max_examples=200, deadline=None)
@given(gaussian_rationals, nonzero_gaussian_rationals)
def test_exact_division_inverts_multiplication(x, y):
    assert (x * y) / y == x
    assert (x / y) * y == x


def test_float_precisions_do_not_mix():
    a = ExactComplex(1).to_float(64)
    b = ExactComplex(1).to_float(128)
    with pytest.raises(PrecisionMismatchError):
        a + b


def test_exact_operand_promotes_to_float():
    f = ExactComplex(Fraction(1, 2)).to_float(64)
    total = ExactComplex(1) + f
    assert isinstance(total, FloatComplex)
    assert total.precision_bits == 64
    assert total.to_exact() == ExactComplex(Fraction(3, 2))


def test_to_precision_rounds_and_widens():
    third = ExactComplex(Fraction(1, 3)).to_float(64)
    wide = third.to_precision(256)
    assert wide.precision_bits == 256
    # widening is exact, so the dyadic value survives
    assert wide.to_exact() == third.to_exact()
    assert third.to_exact() != ExactComplex(Fraction(1, 3))


def test_ext_div_sends_nonzero_over_zero_to_infinity():
    assert ext_div(1, 0) == INFINITY
    assert ext_div(ExactComplex(3), ExactComplex(2)) == Finite(Fraction(3, 2))


def test_chordal_distance_of_one_and_two():
    d = chordal_distance(1, 2)
    with mpmath.workprec(256):
        assert abs(d - 1 / mpmath.sqrt(10)) < mpmath.mpf(10) ** -70
    assert chordal_distance_sq(1, 2) == Fraction(1, 10)


def test_chordal_distance_at_infinity():
    assert chordal_distance(INFINITY, INFINITY) == 0
    assert chordal_distance(0, INFINITY) == 1
    assert chordal_distance_sq(ExactComplex(0, 1), INFINITY) == Fraction(1, 2)


def test_chordal_distance_is_bounded_and_symmetric():
    points = [Finite(0), Finite(ExactComplex(3, -4)), INFINITY, Finite(Fraction(-1, 7))]
    for w in points:
        for z in points:
            d = chordal_distance(w, z)
            assert 0 <= d <= 1
            assert d == chordal_distance(z, w)


sphere_points = st.one_of(gaussian_rationals.map(Finite), st.just(INFINITY))


@settings(max_examples=200, deadline=None)
@given(sphere_points, sphere_points)
def test_float_chordal_distance_matches_exact_square(w, z):
    ctx = float_context(256)
    d = chordal_distance(w, z, 256)
    exact = chordal_distance_sq(w, z)
    exact_f = ctx.mpf(exact.numerator) / exact.denominator
    assert abs(d * d - exact_f) <= ctx.mpf(2) ** -200 * exact_f


@settings(max_examples=200, deadline=None)
@given(sphere_points, sphere_points, sphere_points)
def test_chordal_triangle_inequality(x, y, z):
    ctx = float_context(256)
    lhs = chordal_distance(x, z, 256)
    assert lhs <= chordal_distance(x, y, 256) + chordal_distance(y, z, 256) + 2 * ctx.eps
    assert (lhs == 0) == (x == z)


def test_agreed_digits_caps_at_precision():
    x = ExactComplex(Fraction(1, 3)).to_float(256)
    assert agreed_digits(x, x, 256) == decimal_digits(256)
    assert agreed_digits(Finite(1), Finite(Fraction(1000001, 1000000)), 256) == 6


def test_parse_complex_literals():
    assert parse_complex("3/2") == ExactComplex(Fraction(3, 2))
    assert parse_complex("-1/2+0i") == ExactComplex(Fraction(-1, 2), 0)
    assert parse_complex("2i") == ExactComplex(0, 2)
    assert parse_complex("-i") == ExactComplex(0, -1)
    assert parse_complex("i") == ExactComplex(0, 1)
    assert parse_complex("1-2i") == ExactComplex(1, -2)
    assert parse_complex(" 3/2 + 1/3i ") == ExactComplex(Fraction(3, 2), Fraction(1, 3))
    assert parse_complex("0.5", 64) == ExactComplex(Fraction(1, 2))


def test_decimal_literal_becomes_binary_float():
    value = parse_complex("0.1", 64).re
    denominator = value.denominator
    assert denominator & (denominator - 1) == 0
    assert abs(value - Fraction(1, 10)) < Fraction(1, 2 ** 64)


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1.5/2", "2ii", "q"])
def test_parse_complex_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse_complex(text)


def test_parse_ext_accepts_infinity():
    assert parse_ext("inf") == INFINITY
    assert parse_ext("oo").is_infinite
    assert parse_ext("2") == Finite(2)


def test_format_scalar():
    assert format_scalar(ExactComplex(4)) == "4"
    assert format_scalar(ExactComplex(Fraction(3, 2), -1)) == "3/2-1i"
    assert format_scalar(ExactComplex(0, Fraction(1, 2))) == "1/2i"
    assert format_scalar(ExactComplex(Fraction(1, 2)).to_float(64)) == "0.5"
    assert format_ext(INFINITY) == "inf"


def test_format_float_round_trips():
    x = ExactComplex(Fraction(1, 3)).to_float(128)
    text = format_scalar(x)
    assert parse_complex(text, 128).to_float(128) == x
