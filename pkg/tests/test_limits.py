"""
Odd/even limit estimation and the general convergence probe
"""
from fractions import Fraction

import mpmath
import pytest

from src.cf_core import finite_source
from src.limits import (
    LimitEstimate,
    estimate_from_values,
    estimate_subsequence_limits,
    exact_rational_fit,
    general_convergence_probe,
    limits_distinct,
)
from src.numerics import ExactComplex, Finite, PreconditionError, chordal_distance
from src.qcf import example2_source, instantiate, registry_lookup, rogers_ramanujan_value


def test_example2_limits_exact():
    odd, even = estimate_subsequence_limits(example2_source(), exact=True)
    assert odd.converged and even.converged
    assert odd.value == Finite(1)
    assert even.value == Finite(3)
    assert odd.exact and even.method == "rational-fit"


def test_example2_limits_float():
    odd, even = estimate_subsequence_limits(example2_source(), 256, 1e-30)
    assert odd.converged and even.converged
    assert chordal_distance(odd.value, Finite(1)) < 1e-12
    assert chordal_distance(even.value, Finite(3)) < 1e-12
    assert limits_distinct(odd, even, 1e-30, 256)


@pytest.mark.parametrize("q", [2, 3])
def test_rogers_ramanujan_parity_limits(q):
    """Even approximants tend to 1/K(-1/q), odd ones to q K(1/q^4)"""
    cf = instantiate(registry_lookup("K"), q)
    odd, even = estimate_subsequence_limits(cf, 256, 1e-45)
    assert odd.converged and even.converged
    assert odd.agreed_digits >= 40

    even_oracle = 1 / rogers_ramanujan_value(Fraction(-1, q), bits=256)
    odd_oracle = q * rogers_ramanujan_value(Fraction(1, q ** 4), bits=256)
    assert chordal_distance(even.value, even_oracle) < 1e-40
    assert chordal_distance(odd.value, odd_oracle) < 1e-40


def test_finite_source_uses_terminal_value():
    cf = finite_source(1, [(1, 1), (1, 1), (1, 1)])
    odd, even = estimate_subsequence_limits(cf, exact=True)
    assert odd.method == "terminal"
    assert odd.value == even.value == Finite(Fraction(5, 3))


def test_exact_rational_fit_finds_leading_ratio():
    indices = list(range(1, 30))
    values = [Finite(Fraction(3 * n * n + 2 * n + 1, n * n + n)) for n in indices]
    assert exact_rational_fit(indices, values) == Finite(3)
    # not a rational function of low degree
    wild = [Finite(Fraction(2 ** n, n + 1)) for n in indices]
    assert exact_rational_fit(indices, wild) is None


def test_estimate_from_values_reports_failure():
    indices = list(range(1, 40))
    values = [Finite(ExactComplex((-1) ** n)) for n in indices]
    estimate = estimate_from_values(indices, values, None, 256, 1e-30, 80)
    assert isinstance(estimate, LimitEstimate)
    assert not estimate.converged
    assert estimate.method == "none"


def test_probe_example2_exact():
    report = general_convergence_probe(example2_source(), "1", "2", depth=1000, exact=True)
    assert report.evidence
    assert report.v_limit.value == Finite(3)
    assert report.w_limit.value == Finite(3)
    with mpmath.workprec(256):
        assert abs(report.separation - 1 / mpmath.sqrt(10)) < mpmath.mpf(10) ** -60


def test_probe_example2_float():
    report = general_convergence_probe(example2_source(), "1", "2", depth=1000)
    assert report.evidence
    assert chordal_distance(report.v_limit.value, Finite(3)) < 1e-12
    assert chordal_distance(report.w_limit.value, Finite(3)) < 1e-12
    assert report.to_dict()["general_convergence_evidence"] is True


def test_probe_accepts_callable_rules():
    report = general_convergence_probe(example2_source(), lambda n: 1, "inf", depth=400, exact=True)
    # S_n(inf) = A_(n-1)/B_(n-1) keeps the parity split
    assert not report.evidence


def test_probe_without_general_convergence():
    cf = instantiate(registry_lookup("K"), 2)
    report = general_convergence_probe(cf, "0", "inf", depth=400)
    assert not report.v_limit.converged
    assert not report.evidence


def test_shallow_depths_are_rejected():
    with pytest.raises(PreconditionError):
        general_convergence_probe(example2_source(), "1", "2", depth=1, exact=True)
    with pytest.raises(PreconditionError):
        general_convergence_probe(finite_source(1, [(1, 1)]), "1", "2")
    with pytest.raises(PreconditionError):
        estimate_subsequence_limits(example2_source(), max_depth=4)
