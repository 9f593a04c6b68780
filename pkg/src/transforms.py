"""
Structure-preserving rewrites of continued fractions

Equivalence transformations, unit-numerator and unit-denominator normal
forms, Bernoulli's construction and the odd/even parts built on it. Every
transform is lazy: output coefficient n is computed on demand.
"""

import logging
import threading
from typing import Callable, Dict, List, Optional, Sequence, Union

from src.cf_core import ApproximantTable, CoefficientSource, PartialQuotient
from src.numerics import (
    DegenerateFractionError,
    ExtComplex,
    RepeatedValueError,
    Scalar,
    WrongFormError,
    ZeroFactorError,
    as_ext,
    one_like,
    to_scalar,
)

logger = logging.getLogger(__name__)


class EquivalenceFactors:
    """Nonzero multipliers r_1, r_2, ... with implicit r_0 = 1"""

    def __init__(self, rule: Callable[[int], Scalar], length: Optional[int] = None):
        self._rule = rule
        self.length = length
        self._cache: Dict[int, Scalar] = {}
        self._lock = threading.Lock()

    def __call__(self, n: int) -> Scalar:
        if n == 0:
            return to_scalar(1)
        if self.length is not None and n > self.length:
            raise IndexError(f"Equivalence factor {n} not defined (length {self.length})")
        with self._lock:
            if n in self._cache:
                return self._cache[n]
        r = to_scalar(self._rule(n))
        if r.is_zero():
            raise ZeroFactorError("Equivalence factor vanishes", n)
        with self._lock:
            self._cache.setdefault(n, r)
        return r


def equivalence_factors(factors: Union[Callable[[int], Scalar], Sequence]) -> EquivalenceFactors:
    """Build factors from a callable of n or a list (r_1, r_2, ...)"""
    if callable(factors):
        return EquivalenceFactors(factors)
    values = list(factors)
    return EquivalenceFactors(lambda n: values[n - 1], length=len(values))


def _derived(cf: CoefficientSource, rule, name: str, build, length: Optional[int] = None,
             b0=None) -> CoefficientSource:
    return CoefficientSource(
        cf.b0 if b0 is None else b0,
        rule,
        length=cf.length if length is None else length,
        name=f"{name}({cf.name})" if cf.name else name,
        reprecision=lambda bits: build(cf.at_precision(bits)),
    )


def apply_equivalence(cf: CoefficientSource, r: EquivalenceFactors) -> CoefficientSource:
    """a'_n = r_n r_{n-1} a_n, b'_n = r_n b_n; approximants are unchanged"""
    if r.length is not None and (cf.length is None or cf.length > r.length):
        raise ValueError("Equivalence factors do not cover the source length")

    def rule(n: int) -> PartialQuotient:
        pq = cf.coefficient(n)
        rn = r(n)
        return PartialQuotient.at_index(rn * r(n - 1) * pq.a, rn * pq.b, n)

    return _derived(cf, rule, "equivalent", lambda src: apply_equivalence(src, r))


def to_unit_numerator_factors(cf: CoefficientSource) -> EquivalenceFactors:
    """The forced factors r_n = 1/(a_n r_{n-1}) that make every a'_n = 1"""
    table: List[Scalar] = [to_scalar(1)]
    lock = threading.Lock()

    def rule(n: int) -> Scalar:
        with lock:
            while len(table) <= n:
                k = len(table)
                table.append(1 / (cf.coefficient(k).a * table[k - 1]))
            return table[n]

    return EquivalenceFactors(rule, length=cf.length)


def to_unit_numerator(cf: CoefficientSource) -> CoefficientSource:
    """Equivalent fraction b_0 + K 1/b'_n"""
    r = to_unit_numerator_factors(cf)

    def rule(n: int) -> PartialQuotient:
        pq = cf.coefficient(n)
        return PartialQuotient(one_like(pq.a), r(n) * pq.b)

    return _derived(cf, rule, "unit-numerator", to_unit_numerator)


def to_unit_denominator(cf: CoefficientSource) -> CoefficientSource:
    """Equivalent fraction b_0 + K c_n/1 with c_1 = a_1/b_1, c_n = a_n/(b_n b_{n-1})"""

    def rule(n: int) -> PartialQuotient:
        pq = cf.coefficient(n)
        if pq.b.is_zero():
            raise ZeroFactorError("Partial denominator vanishes", n)
        den = pq.b
        if n > 1:
            prev = cf.coefficient(n - 1).b
            if prev.is_zero():
                raise ZeroFactorError("Partial denominator vanishes", n - 1)
            den = den * prev
        return PartialQuotient.at_index(pq.a / den, one_like(pq.a), n)

    return _derived(cf, rule, "unit-denominator", to_unit_denominator)


def _finite_value(value, index: int) -> Scalar:
    value = as_ext(value)
    if value.is_infinite:
        raise DegenerateFractionError("Bernoulli construction needs finite values", index)
    return value.value


class _ValueSequence:
    """Memoised K_0, K_1, ... with the distinct-neighbour check"""

    def __init__(self, producer: Callable[[int], ExtComplex]):
        self._producer = producer
        self._values: List[Scalar] = []
        self._lock = threading.Lock()

    def __call__(self, n: int) -> Scalar:
        with self._lock:
            while len(self._values) <= n:
                k = len(self._values)
                value = _finite_value(self._producer(k), k)
                if k > 0 and value == self._values[k - 1]:
                    raise RepeatedValueError(k)
                self._values.append(value)
            return self._values[n]


def _bernoulli_rule(K: Callable[[int], Scalar]):
    def rule(n: int) -> PartialQuotient:
        if n == 1:
            return PartialQuotient.at_index(K(1) - K(0), one_like(K(0)), n)
        if n == 2:
            return PartialQuotient.at_index(K(1) - K(2), K(2) - K(0), n)
        return PartialQuotient.at_index(
            (K(n - 2) - K(n - 3)) * (K(n - 1) - K(n)), K(n) - K(n - 2), n
        )

    return rule


def _bernoulli_unit_denominator_rule(K: Callable[[int], Scalar]):
    def rule(n: int) -> PartialQuotient:
        one = one_like(K(0))
        if n == 1:
            return PartialQuotient.at_index(K(1) - K(0), one, n)
        b_n = K(n) - K(n - 2)
        if b_n.is_zero():
            raise ZeroFactorError("Bernoulli partial denominator vanishes", n)
        if n == 2:
            return PartialQuotient.at_index((K(1) - K(2)) / b_n, one, n)
        b_prev = K(n - 1) - K(n - 3)
        if b_prev.is_zero():
            raise ZeroFactorError("Bernoulli partial denominator vanishes", n - 1)
        return PartialQuotient.at_index(
            (K(n - 2) - K(n - 3)) * (K(n - 1) - K(n)) / (b_n * b_prev), one, n
        )

    return rule


def _value_list(values: List) -> _ValueSequence:
    if not values:
        raise ValueError("Bernoulli construction needs at least one value")
    seq = _ValueSequence(lambda n: as_ext(values[n]))
    seq(len(values) - 1)
    return seq


def bernoulli_cf(K: Sequence) -> CoefficientSource:
    """Fraction whose approximants are exactly K_1, ..., K_{m-1} with b_0 = K_0"""
    values = list(K)
    seq = _value_list(values)
    return CoefficientSource(
        seq(0), _bernoulli_rule(seq), length=len(values) - 1, name="bernoulli",
        reprecision=lambda bits: bernoulli_cf([as_ext(v).to_float(bits) for v in values]),
    )


def bernoulli_unit_denominator(K: Sequence) -> CoefficientSource:
    """Unit-denominator form of the Bernoulli construction, built directly"""
    values = list(K)
    seq = _value_list(values)
    return CoefficientSource(
        seq(0), _bernoulli_unit_denominator_rule(seq), length=len(values) - 1,
        name="bernoulli-unit-denominator",
        reprecision=lambda bits: bernoulli_unit_denominator([as_ext(v).to_float(bits) for v in values]),
    )


def _part(cf: CoefficientSource, offset: int, name: str, build) -> CoefficientSource:
    table = ApproximantTable(cf)
    if offset == 0:
        length = None if cf.length is None else cf.length // 2
    else:
        if cf.length == 0:
            raise ValueError("The odd part needs at least one partial quotient")
        length = None if cf.length is None else (cf.length - 1) // 2

    # K_n = A_{2n+offset}/B_{2n+offset}; K_0 of the even part is b_0
    seq = _ValueSequence(lambda n: table.value(2 * n + offset))
    return _derived(cf, _bernoulli_rule(seq), name, build, length=length, b0=seq(0))


def even_part(cf: CoefficientSource) -> CoefficientSource:
    """Fraction whose n-th approximant is A_{2n}/B_{2n}"""
    return _part(cf, 0, "even-part", even_part)


def odd_part(cf: CoefficientSource) -> CoefficientSource:
    """Fraction with zeroth approximant A_1/B_1 and n-th approximant A_{2n+1}/B_{2n+1}"""
    return _part(cf, 1, "odd-part", odd_part)


def unit_denominator_equal(cf1: CoefficientSource, cf2: CoefficientSource, depth: int) -> bool:
    """Coefficientwise comparison of two fractions of the form b_0 + K a_n/1"""
    n1, n2 = cf1.available(depth), cf2.available(depth)
    for cf, reach in ((cf1, n1), (cf2, n2)):
        for n in range(1, reach + 1):
            if cf.coefficient(n).b != 1:
                raise WrongFormError(f"{cf.name or 'fraction'} has b_{n} != 1")
    if n1 != n2 or cf1.b0 != cf2.b0:
        return False
    return all(cf1.coefficient(n).a == cf2.coefficient(n).a for n in range(1, n1 + 1))
