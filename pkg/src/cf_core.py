"""
Continued-fraction representation and the convergent engine
"""

import logging
import threading
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple, Union

from src.numerics import (
    DegenerateFractionError,
    ExtComplex,
    FloatComplex,
    Scalar,
    ZeroPartialNumeratorError,
    as_ext,
    ext_div,
    one_like,
    to_scalar,
    zero_like,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartialQuotient:
    """Pair (a_n, b_n); a zero partial numerator is rejected"""

    a: Scalar
    b: Scalar

    def __post_init__(self):
        object.__setattr__(self, "a", to_scalar(self.a))
        object.__setattr__(self, "b", to_scalar(self.b))
        if self.a.is_zero():
            raise ZeroPartialNumeratorError()

    @classmethod
    def at_index(cls, a, b, index: int) -> "PartialQuotient":
        try:
            return cls(a, b)
        except ZeroPartialNumeratorError:
            raise ZeroPartialNumeratorError(index) from None


Rule = Callable[[int], Union[PartialQuotient, Tuple[Any, Any]]]


class CoefficientSource:
    """b_0 plus a (possibly unbounded) stream of partial quotients, 1-based

    Coefficients are produced by ``rule(n)`` on first use and memoised, so
    repeated traversal yields identical values.
    """

    def __init__(
        self,
        b0,
        rule: Rule,
        length: Optional[int] = None,
        name: str = "",
        origin: Optional[Any] = None,
        reprecision: Optional[Callable[[int], "CoefficientSource"]] = None,
    ):
        """Initialize the source

        Args:
            b0: Constant term
            rule: Callable mapping n >= 1 to a PartialQuotient or an (a, b) pair
            length: Number of partial quotients, None when unbounded
            name: Display name used in reports
            origin: Family/q pair the source was instantiated from, if any
            reprecision: Builds the same source in the float backend at a precision
        """
        if length is not None and length < 0:
            raise ValueError(f"Length must be nonnegative, got {length}")
        self.b0 = to_scalar(b0)
        self.length = length
        self.name = name
        self.origin = origin
        self._rule = rule
        self._reprecision = reprecision
        self._cache: Dict[int, PartialQuotient] = {}
        self._lock = threading.Lock()

    @property
    def is_finite(self) -> bool:
        return self.length is not None

    @property
    def precision_bits(self) -> Optional[int]:
        return self.b0.precision_bits

    def coefficient(self, n: int) -> PartialQuotient:
        if n < 1 or (self.length is not None and n > self.length):
            raise IndexError(f"Partial quotient {n} outside 1..{self.length or 'inf'}")
        with self._lock:
            cached = self._cache.get(n)
        if cached is not None:
            return cached
        produced = self._rule(n)
        if isinstance(produced, PartialQuotient):
            pq = produced
        else:
            pq = PartialQuotient.at_index(produced[0], produced[1], n)
        with self._lock:
            self._cache.setdefault(n, pq)
        return pq

    def partial_quotients(self, depth: int) -> Iterator[PartialQuotient]:
        for n in range(1, depth + 1):
            yield self.coefficient(n)

    def available(self, depth: int) -> int:
        """Depth actually reachable (finite sources stop at their length)"""
        return depth if self.length is None else min(depth, self.length)

    def at_precision(self, bits: int) -> "CoefficientSource":
        """Same fraction in the float backend at ``bits`` precision"""
        if self._reprecision is not None:
            return self._reprecision(bits)

        def rule(n: int) -> PartialQuotient:
            pq = self.coefficient(n)
            return PartialQuotient(pq.a.to_float(bits), pq.b.to_float(bits))

        return CoefficientSource(self.b0.to_float(bits), rule, self.length, self.name, self.origin)

    def __repr__(self):
        bound = "inf" if self.length is None else self.length
        return f"CoefficientSource(name={self.name!r}, length={bound})"


def rule_source(name: str, b0, rule: Rule, length: Optional[int] = None) -> CoefficientSource:
    """Source whose partial quotients are closed-form functions of n"""
    return CoefficientSource(b0, rule, length=length, name=name)


def finite_source(b0, quotients: List[Tuple[Any, Any]], name: str = "") -> CoefficientSource:
    pqs = [PartialQuotient.at_index(a, b, i + 1) for i, (a, b) in enumerate(quotients)]
    return CoefficientSource(b0, lambda n: pqs[n - 1], length=len(pqs), name=name)


@dataclass(frozen=True)
class ConvergentState:
    """Rolling window (A_n, A_{n-1}, B_n, B_{n-1}) of the three-term recurrence

    ``det_running`` equals A_n B_{n-1} - A_{n-1} B_n, i.e. (-1)^(n-1) times the
    product of the partial numerators, divided by 4**scale_exponent when the
    float backend has rescaled the window.
    """

    n: int
    A_curr: Scalar
    A_prev: Scalar
    B_curr: Scalar
    B_prev: Scalar
    det_running: Scalar
    scale_exponent: int = 0

    @classmethod
    def seed(cls, b0) -> "ConvergentState":
        b0 = to_scalar(b0)
        one = one_like(b0)
        return cls(0, b0, one, one, zero_like(b0), -one)

    @property
    def precision_bits(self) -> Optional[int]:
        return self.A_curr.precision_bits

    def advance(self, pq: PartialQuotient) -> "ConvergentState":
        return advance(self, pq)


def _rescale(state: ConvergentState) -> ConvergentState:
    bits = state.precision_bits
    exponents = [
        v.exponent() for v in (state.A_curr, state.A_prev, state.B_curr, state.B_prev)
        if not v.is_zero()
    ]
    if not exponents:
        return state
    e = max(exponents)
    if e <= bits // 2:
        return state
    return ConvergentState(
        state.n,
        state.A_curr.scale2(-e),
        state.A_prev.scale2(-e),
        state.B_curr.scale2(-e),
        state.B_prev.scale2(-e),
        state.det_running.scale2(-2 * e),
        state.scale_exponent + e,
    )


def advance(state: ConvergentState, pq: PartialQuotient) -> ConvergentState:
    """One step of X_n = b_n X_{n-1} + a_n X_{n-2} for X = A, B"""
    a, b = pq.a, pq.b
    new = ConvergentState(
        state.n + 1,
        b * state.A_curr + a * state.A_prev,
        state.A_curr,
        b * state.B_curr + a * state.B_prev,
        state.B_curr,
        -(a * state.det_running),
        state.scale_exponent,
    )
    if isinstance(new.A_curr, FloatComplex):
        new = _rescale(new)
    return new


def approximant(state: ConvergentState) -> ExtComplex:
    try:
        return ext_div(state.A_curr, state.B_curr)
    except DegenerateFractionError:
        raise DegenerateFractionError("Approximant is 0/0", state.n) from None


def modified_approximant(state: ConvergentState, w) -> ExtComplex:
    """S_n(w) = (A_n + w A_{n-1}) / (B_n + w B_{n-1}); S_n(inf) = A_{n-1}/B_{n-1}"""
    w = as_ext(w)
    try:
        if w.is_infinite:
            return ext_div(state.A_prev, state.B_prev)
        return ext_div(state.A_curr + w.value * state.A_prev, state.B_curr + w.value * state.B_prev)
    except DegenerateFractionError:
        raise DegenerateFractionError("Modified approximant is 0/0", state.n) from None


def denominator_ratio(state: ConvergentState) -> ExtComplex:
    try:
        return ext_div(state.B_curr, state.B_prev)
    except DegenerateFractionError:
        raise DegenerateFractionError("B_n and B_(n-1) both vanish", state.n) from None


def convergents(cf: CoefficientSource, depth: int) -> Iterator[ConvergentState]:
    """Yield the states for n = 1..depth"""
    if cf.length is not None and depth > cf.length:
        raise ValueError(f"Depth {depth} exceeds source length {cf.length}")
    state = ConvergentState.seed(cf.b0)
    for pq in cf.partial_quotients(depth):
        state = advance(state, pq)
        yield state


def evaluate(cf: CoefficientSource, depth: int) -> List[Tuple[int, ExtComplex]]:
    """Approximants 1..depth in order"""
    if depth < 0:
        raise ValueError(f"Depth must be nonnegative, got {depth}")
    result = [(state.n, approximant(state)) for state in convergents(cf, depth)]
    logger.debug(f"Evaluated {cf.name or 'fraction'} to depth {depth}")
    return result


def approximant_values(cf: CoefficientSource, depth: int) -> List[ExtComplex]:
    """K_0 = b_0 followed by approximants 1..depth"""
    return [ExtComplex(cf.b0)] + [value for _, value in evaluate(cf, depth)]


class ApproximantTable:
    """Lazily extended table of the states of one source, shared between readers"""

    def __init__(self, cf: CoefficientSource):
        self.cf = cf
        self._states: List[ConvergentState] = [ConvergentState.seed(cf.b0)]
        self._lock = threading.Lock()

    def state(self, n: int) -> ConvergentState:
        if n < 0:
            raise IndexError(f"State index must be nonnegative, got {n}")
        with self._lock:
            while len(self._states) <= n:
                index = len(self._states)
                self._states.append(advance(self._states[-1], self.cf.coefficient(index)))
            return self._states[n]

    def value(self, n: int) -> ExtComplex:
        """A_n/B_n, with A_0/B_0 = b_0"""
        return approximant(self.state(n))
