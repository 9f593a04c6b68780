"""
Equivalence transforms, normal forms, Bernoulli's construction, odd/even parts
"""
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import gaussian_rationals, nonzero_gaussian_rationals
from src.cf_core import approximant_values, evaluate, finite_source
from src.numerics import (
    ExactComplex,
    Finite,
    RepeatedValueError,
    WrongFormError,
    ZeroFactorError,
)
from src.qcf import example2_source, instantiate, registry_lookup
from src.transforms import (
    apply_equivalence,
    bernoulli_cf,
    bernoulli_unit_denominator,
    equivalence_factors,
    even_part,
    odd_part,
    to_unit_denominator,
    to_unit_numerator,
    to_unit_numerator_factors,
    unit_denominator_equal,
)

fractions_corpus = st.lists(
    st.tuples(nonzero_gaussian_rationals, nonzero_gaussian_rationals), min_size=1, max_size=40
)


def _coefficients(cf, depth):
    return [(pq.a, pq.b) for pq in cf.partial_quotients(depth)]


@pytest.mark.parametrize("q", [2, 3, ExactComplex(1, 1), ExactComplex(Fraction(-3, 2))])
def test_rogers_ramanujan_unit_numerator_pattern(q):
    """b'_(2n-1) = b'_2n = q^-n and a'_n = 1"""
    q = ExactComplex(q) if not isinstance(q, ExactComplex) else q
    unit = to_unit_numerator(instantiate(registry_lookup("K"), q))
    for n in range(1, 21):
        assert unit.coefficient(2 * n - 1).b == q ** -n
        assert unit.coefficient(2 * n).b == q ** -n
        assert unit.coefficient(2 * n).a == 1


def test_example2_unit_numerator_values():
    unit = to_unit_numerator(example2_source())
    assert [pq.b for pq in unit.partial_quotients(4)] == [
        Fraction(1, 2), -4, Fraction(1, 10), Fraction(-5, 8)
    ]
    factors = to_unit_numerator_factors(example2_source())
    assert [factors(n) for n in range(4)] == [1, Fraction(1, 2), -2, Fraction(-1, 5)]


def test_example2_unit_denominator_values():
    unit = to_unit_denominator(example2_source())
    assert unit.b0 == 0
    assert _coefficients(unit, 3) == [(2, 1), (Fraction(-1, 2), 1), (Fraction(-5, 2), 1)]


def test_unit_denominator_rejects_zero_denominator():
    cf = finite_source(1, [(1, 2), (3, 0), (1, 1)])
    unit = to_unit_denominator(cf)
    with pytest.raises(ZeroFactorError) as exc:
        unit.coefficient(2)
    assert exc.value.index == 2


def test_equivalence_factor_zero_is_rejected():
    r = equivalence_factors([1, 0, 2])
    with pytest.raises(ZeroFactorError):
        r(2)


def test_bernoulli_example():
    cf = bernoulli_cf([0, 2, 4, Fraction(3, 2)])
    assert cf.length == 3
    assert _coefficients(cf, 3) == [(2, 1), (-2, 4), (5, Fraction(-1, 2))]
    assert [v for _, v in evaluate(cf, 3)] == [Finite(2), Finite(4), Finite(Fraction(3, 2))]


def test_bernoulli_rejects_repeated_values():
    with pytest.raises(RepeatedValueError) as exc:
        bernoulli_cf([1, 2, 2, 3])
    assert exc.value.index == 2


def test_even_and_odd_parts_of_example2():
    even = even_part(example2_source())
    assert [v for _, v in evaluate(even, 3)] == [Finite(4), Finite(Fraction(7, 2)), Finite(Fraction(10, 3))]
    odd = odd_part(example2_source())
    assert odd.b0 == 2
    assert [v for _, v in evaluate(odd, 3)] == [
        Finite(Fraction(3, 2)), Finite(Fraction(4, 3)), Finite(Fraction(5, 4))
    ]


def test_odd_part_needs_a_partial_quotient():
    with pytest.raises(ValueError):
        odd_part(finite_source(1, []))


def test_unit_denominator_equal_requires_unit_denominators():
    with pytest.raises(WrongFormError):
        unit_denominator_equal(example2_source(), to_unit_denominator(example2_source()), 5)


def test_float_transform_follows_precision():
    unit = to_unit_numerator(instantiate(registry_lookup("K"), 2)).at_precision(128)
    assert unit.coefficient(3).b.precision_bits == 128
    assert unit.coefficient(3).b == ExactComplex(Fraction(1, 4))


# --- random exact corpus ----------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(fractions_corpus, gaussian_rationals, st.data())
def test_equivalence_preserves_approximants(quotients, b0, data):
    cf = finite_source(b0, quotients)
    factors = data.draw(st.lists(nonzero_gaussian_rationals, min_size=len(quotients), max_size=len(quotients)))
    depth = len(quotients)
    expected = evaluate(cf, depth)
    assert evaluate(apply_equivalence(cf, equivalence_factors(factors)), depth) == expected
    assert evaluate(to_unit_numerator(cf), depth) == expected
    assert evaluate(to_unit_denominator(cf), depth) == expected


@settings(max_examples=200, deadline=None)
@given(fractions_corpus, gaussian_rationals)
def test_contractions_match_subsequences(quotients, b0):
    cf = finite_source(b0, quotients)
    depth = len(quotients)
    values = approximant_values(cf, depth)
    assume(all(v.is_finite for v in values))
    evens, odds = values[0::2], values[1::2]

    if all(x != y for x, y in zip(evens, evens[1:])):
        even = even_part(cf)
        assert even.b0 == b0
        assert [v for _, v in evaluate(even, depth // 2)] == evens[1:]
    if all(x != y for x, y in zip(odds, odds[1:])):
        odd = odd_part(cf)
        assert Finite(odd.b0) == odds[0]
        assert [v for _, v in evaluate(odd, (depth - 1) // 2)] == odds[1:]


@settings(max_examples=200, deadline=None)
@given(st.lists(gaussian_rationals, min_size=2, max_size=40, unique=True))
def test_bernoulli_round_trip(values):
    cf = bernoulli_cf(values)
    assert cf.b0 == values[0]
    assert [v for _, v in evaluate(cf, len(values) - 1)] == [Finite(v) for v in values[1:]]


@settings(max_examples=200, deadline=None)
@given(st.lists(gaussian_rationals, min_size=2, max_size=40, unique=True))
def test_bernoulli_unit_denominator_agrees(values):
    """Unit-denominator form of the construction equals the direct display coefficientwise"""
    depth = len(values) - 1
    direct = bernoulli_unit_denominator(values)
    transformed = to_unit_denominator(bernoulli_cf(values))
    assert unit_denominator_equal(direct, transformed, depth)
    assert evaluate(direct, depth) == evaluate(bernoulli_cf(values), depth)


@settings(max_examples=100, deadline=None)
@given(fractions_corpus, gaussian_rationals)
def test_rebuilding_from_approximants_keeps_unit_denominator_form(quotients, b0):
    cf = finite_source(b0, quotients)
    depth = len(quotients)
    values = approximant_values(cf, depth)
    assume(all(v.is_finite for v in values))
    assume(all(x != z for x, z in zip(values, values[2:])))
    rebuilt = bernoulli_cf(values)
    assert unit_denominator_equal(to_unit_denominator(rebuilt), to_unit_denominator(cf), depth)
