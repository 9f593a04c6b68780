"""
Limit estimation for approximant subsequences

Float estimates run at two precisions (p and p + 64 bits) and only digits on
which both runs agree count. A subsequence is accepted either by the window
rule (small chordal diameter over the tail) or, when that fails, by a rational
extrapolation in the subsequence index that is verified on extra tail points.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.polyfuncs import rational_interpolate

from src.cf_core import ApproximantTable, CoefficientSource, modified_approximant
from src.numerics import (
    DEFAULT_PRECISION_BITS,
    ExactComplex,
    ExtComplex,
    FloatComplex,
    INFINITY,
    PreconditionError,
    agreed_digits,
    as_ext,
    chordal_distance,
    chordal_distance_sq,
    decimal_digits,
    float_context,
    format_ext,
    format_real,
    parse_ext,
)

logger = logging.getLogger(__name__)

EXTRA_BITS = 64
START_DEPTH = 64
MIN_WINDOW = 16
MAX_FIT_DEGREE = 4
VERIFY_POINTS = 4


@dataclass(frozen=True)
class LimitEstimate:
    value: ExtComplex
    agreed_digits: int
    depth_used: int
    converged: bool
    method: str = "window"
    exact: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": format_ext(self.value),
            "agreed_digits": self.agreed_digits,
            "depth_used": self.depth_used,
            "converged": self.converged,
            "method": self.method,
            "exact": self.exact,
        }


def tol_digits(tol: float, bits: int) -> int:
    """Decimal digits demanded by a tolerance, capped by the precision"""
    ctx = float_context(bits)
    return max(0, min(decimal_digits(bits), int(ctx.floor(-ctx.log10(ctx.mpf(tol))))))


def window_size(count: int, depth: int) -> int:
    return min(count, max(MIN_WINDOW, depth // 8))


def _window_diameter(values: Sequence[ExtComplex], bits: int):
    """Upper bound 2 max d(x_i, x_last) for the chordal diameter of the values"""
    last = values[-1]
    return 2 * max(chordal_distance(v.to_float(bits), last.to_float(bits)) for v in values)


def _exact_window_converged(values: Sequence[ExtComplex], tol: float) -> bool:
    bound = Fraction(tol) ** 2 / 4
    last = values[-1]
    return all(chordal_distance_sq(v, last) < bound for v in values)


# --- rational extrapolation -------------------------------------------------

def _leading_ratio(expr, X) -> ExtComplex:
    num, den = sympy.fraction(sympy.cancel(expr))
    p_num = sympy.Poly(num, X)
    p_den = sympy.Poly(den, X)
    if p_num.is_zero:
        return ExtComplex(ExactComplex(0))
    if p_num.degree() > p_den.degree():
        return INFINITY
    if p_num.degree() < p_den.degree():
        return ExtComplex(ExactComplex(0))
    ratio = sympy.Rational(p_num.LC()) / sympy.Rational(p_den.LC())
    return ExtComplex(ExactComplex(Fraction(int(ratio.p), int(ratio.q))))


def exact_rational_fit(indices: Sequence[int], values: Sequence[ExtComplex]) -> Optional[ExtComplex]:
    """Exact limit of a tail that is a rational function of the index

    Fits degree (m, m) for m = 1..4 through 2m + 1 tail points and accepts the
    first fit reproducing the preceding verification points exactly.
    """
    if any(v.is_infinite or not isinstance(v.value, ExactComplex) or v.value.im != 0 for v in values):
        return None
    X = sympy.Symbol("n")
    reals = [sympy.Rational(v.value.re.numerator, v.value.re.denominator) for v in values]
    for m in range(1, MAX_FIT_DEGREE + 1):
        need = 2 * m + 1 + VERIFY_POINTS
        if len(values) < need:
            break
        fit_points = list(zip(indices[-(2 * m + 1):], reals[-(2 * m + 1):]))
        try:
            expr = rational_interpolate(fit_points, m, X=X)
        except (ArithmeticError, ValueError, TypeError, sympy.PolynomialError):
            continue
        check = zip(indices[-need:-(2 * m + 1)], reals[-need:-(2 * m + 1)])
        try:
            if all(sympy.simplify(expr.subs(X, n) - y) == 0 for n, y in check):
                logger.debug(f"Exact rational fit of degree ({m}, {m}) verified")
                return _leading_ratio(expr, X)
        except ZeroDivisionError:
            continue
    return None


def _float_fit_limit(indices: Sequence[int], values: Sequence[FloatComplex], m: int, bits: int):
    """Leading-coefficient ratio of the degree-(m, m) fit y Q(t) = P(t), t = n/N, Q monic"""
    ctx = float_context(bits)
    scale = ctx.mpf(indices[-1])
    rows, rhs = [], []
    for n, y in zip(indices, values):
        t = ctx.mpf(n) / scale
        row = [t ** i for i in range(m + 1)] + [-y.value * t ** i for i in range(m)]
        rows.append(row)
        rhs.append(y.value * t ** m)
    try:
        solution = ctx.lu_solve(ctx.matrix(rows), ctx.matrix(rhs))
    except ZeroDivisionError:
        return None, None
    p = [solution[i] for i in range(m + 1)]
    qc = [solution[m + 1 + i] for i in range(m)] + [ctx.one]

    def model(n):
        t = ctx.mpf(n) / scale
        den = sum(c * t ** i for i, c in enumerate(qc))
        if den == 0:
            return None
        return sum(c * t ** i for i, c in enumerate(p)) / den

    return FloatComplex(ctx.mpc(p[m]), bits), model


def float_rational_fit(indices: Sequence[int], values: Sequence[ExtComplex], bits: int,
                       tol: float) -> Optional[ExtComplex]:
    """Float extrapolation, stable between two tail windows and verified on extra points"""
    if any(v.is_infinite for v in values):
        return None
    floats = [v.value.to_float(bits) for v in values]
    for m in range(1, MAX_FIT_DEGREE + 1):
        size = 2 * m + 1
        need = 2 * size + VERIFY_POINTS
        if len(floats) < need:
            break
        limits = []
        verified = True
        for shift in (0, size):
            end = len(floats) - shift
            limit, model = _float_fit_limit(indices[end - size:end], floats[end - size:end], m, bits)
            if limit is None:
                verified = False
                break
            for n, y in zip(indices[end - size - VERIFY_POINTS:end - size], floats[end - size - VERIFY_POINTS:end - size]):
                predicted = model(n)
                if predicted is None or chordal_distance(FloatComplex(float_context(bits).mpc(predicted), bits), y) >= tol:
                    verified = False
                    break
            if not verified:
                break
            limits.append(limit)
        if verified and chordal_distance(limits[0], limits[1]) < tol:
            logger.debug(f"Float rational fit of degree ({m}, {m}) verified at {bits} bits")
            return ExtComplex(limits[0])
    return None


# --- estimation from value lists -------------------------------------------

def estimate_from_values(
    indices: Sequence[int],
    primary: Sequence[ExtComplex],
    secondary: Optional[Sequence[ExtComplex]],
    bits: int,
    tol: float,
    depth: int,
) -> LimitEstimate:
    """Limit of one subsequence from its values at one (exact) or two (float) precisions"""
    if not primary:
        raise ValueError("No values to estimate a limit from")
    w = window_size(len(primary), depth)
    if secondary is None:
        if _exact_window_converged(primary[-w:], tol):
            return LimitEstimate(primary[-1], decimal_digits(bits), depth, True, "window", True)
        fitted = exact_rational_fit(indices, primary)
        if fitted is not None:
            return LimitEstimate(fitted, decimal_digits(bits), depth, True, "rational-fit", True)
        return LimitEstimate(primary[-1], 0, depth, False, "none", True)

    needed = tol_digits(tol, bits)
    tail_p, tail_s = primary[-w:], secondary[-w:]
    value = primary[-1]
    digits = agreed_digits(value, secondary[-1], bits)
    if (_window_diameter(tail_p, bits) < tol and _window_diameter(tail_s, bits + EXTRA_BITS) < tol
            and digits >= needed):
        return LimitEstimate(value, digits, depth, True, "window", False)

    fit_p = float_rational_fit(indices, primary, bits, tol)
    fit_s = float_rational_fit(indices, secondary, bits + EXTRA_BITS, tol) if fit_p is not None else None
    if fit_p is not None and fit_s is not None:
        fit_digits = agreed_digits(fit_p, fit_s, bits)
        if fit_digits >= needed:
            return LimitEstimate(fit_p, fit_digits, depth, True, "rational-fit", False)
    return LimitEstimate(value, digits, depth, False, "none", False)


class _Tables:
    """Approximant tables of a source at the working precisions"""

    def __init__(self, cf: CoefficientSource, bits: int, exact: bool):
        self.exact = exact and cf.precision_bits is None
        self.bits = bits
        if self.exact:
            self.tables = [ApproximantTable(cf)]
        else:
            self.tables = [
                ApproximantTable(cf.at_precision(bits)),
                ApproximantTable(cf.at_precision(bits + EXTRA_BITS)),
            ]

    def values(self, producer: Callable[[ApproximantTable, int], ExtComplex],
               indices: Sequence[int]) -> Tuple[List[ExtComplex], Optional[List[ExtComplex]]]:
        lists = [[producer(table, n) for n in indices] for table in self.tables]
        return lists[0], (None if self.exact else lists[1])


def _terminal_estimates(cf: CoefficientSource, tables: _Tables) -> Tuple[LimitEstimate, LimitEstimate]:
    value = tables.tables[0].value(cf.length)
    estimate = LimitEstimate(value, decimal_digits(tables.bits), cf.length, True, "terminal", tables.exact)
    return estimate, estimate


def estimate_subsequence_limits(
    cf: CoefficientSource,
    q_precision: int = DEFAULT_PRECISION_BITS,
    tol: float = 1e-30,
    max_depth: int = 4096,
    exact: bool = False,
    start_depth: int = START_DEPTH,
) -> Tuple[LimitEstimate, LimitEstimate]:
    """(odd, even) limit estimates of A_n/B_n with adaptive depth"""
    if max_depth < 8:
        raise PreconditionError(f"max_depth must be at least 8, got {max_depth}")
    tables = _Tables(cf, q_precision, exact)
    if cf.length is not None and cf.length <= max_depth:
        return _terminal_estimates(cf, tables)

    depth = min(start_depth, max_depth)
    while True:
        odd_idx = list(range(1, depth + 1, 2))
        even_idx = list(range(2, depth + 1, 2))
        odd_p, odd_s = tables.values(lambda t, n: t.value(n), odd_idx)
        even_p, even_s = tables.values(lambda t, n: t.value(n), even_idx)
        sub = [(i + 1) // 2 for i in odd_idx], [i // 2 for i in even_idx]
        odd = estimate_from_values(sub[0], odd_p, odd_s, q_precision, tol, depth)
        even = estimate_from_values(sub[1], even_p, even_s, q_precision, tol, depth)
        logger.debug(f"{cf.name or 'fraction'} depth {depth}: odd {odd.converged}, even {even.converged}")
        if (odd.converged and even.converged) or depth >= max_depth:
            break
        depth = min(2 * depth, max_depth)
    logger.info(
        f"Limits of {cf.name or 'fraction'}: odd {format_ext(odd.value)} ({odd.method}), "
        f"even {format_ext(even.value)} ({even.method}) at depth {depth}"
    )
    return odd, even


def limits_distinct(f1: LimitEstimate, f2: LimitEstimate, tol: float, bits: int) -> bool:
    return chordal_distance(f1.value.to_float(bits), f2.value.to_float(bits)) > 10 * tol


# --- general convergence probe ----------------------------------------------

SequenceRule = Union[str, ExtComplex, Callable[[int], Any]]


def make_rule(rule: SequenceRule, bits: Optional[int] = None) -> Callable[[int], ExtComplex]:
    """Constant ('0', '1', 'inf', complex literal, ExtComplex) or callable n -> value"""
    if callable(rule):
        return lambda n: as_ext(rule(n))
    value = parse_ext(rule, bits) if isinstance(rule, str) else as_ext(rule)
    return lambda n: value


@dataclass(frozen=True)
class ProbeReport:
    v_limit: LimitEstimate
    w_limit: LimitEstimate
    v_parities: Tuple[LimitEstimate, LimitEstimate]
    w_parities: Tuple[LimitEstimate, LimitEstimate]
    separation: Any
    evidence: bool
    depth: int
    precision_bits: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v_limit": self.v_limit.to_dict(),
            "w_limit": self.w_limit.to_dict(),
            "v_parities": {"odd": self.v_parities[0].to_dict(), "even": self.v_parities[1].to_dict()},
            "w_parities": {"odd": self.w_parities[0].to_dict(), "even": self.w_parities[1].to_dict()},
            "separation": format_real(self.separation, self.precision_bits),
            "general_convergence_evidence": self.evidence,
            "depth": self.depth,
        }


def _modified(rule: Callable[[int], ExtComplex]) -> Callable[[ApproximantTable, int], ExtComplex]:
    return lambda table, n: modified_approximant(table.state(n), rule(n))


def _merge_parities(odd: LimitEstimate, even: LimitEstimate, tol: float, bits: int) -> LimitEstimate:
    agree = (odd.converged and even.converged
             and chordal_distance(odd.value.to_float(bits), even.value.to_float(bits)) < tol)
    digits = min(odd.agreed_digits, even.agreed_digits)
    if agree and odd.exact and even.exact and odd.value != even.value:
        agree = False
    return LimitEstimate(even.value, digits if agree else 0, max(odd.depth_used, even.depth_used),
                         agree, even.method if agree else "none", odd.exact and even.exact)


def general_convergence_probe(
    cf: CoefficientSource,
    v: SequenceRule,
    w: SequenceRule,
    depth: int = 1000,
    precision: int = DEFAULT_PRECISION_BITS,
    tol: float = 1e-30,
    exact: bool = False,
) -> ProbeReport:
    """Numerical evidence that S_n(v_n) and S_n(w_n) share one limit with v_n, w_n apart"""
    depth = cf.available(depth)
    if depth < 2:
        raise PreconditionError(f"The probe needs at least two partial quotients, got {depth}")
    tables = _Tables(cf, precision, exact)
    v_rule = make_rule(v, None if tables.exact else precision)
    w_rule = make_rule(w, None if tables.exact else precision)

    odd_idx = list(range(1, depth + 1, 2))
    even_idx = list(range(2, depth + 1, 2))
    sub_odd = [(i + 1) // 2 for i in odd_idx]
    sub_even = [i // 2 for i in even_idx]

    def parities(rule) -> Tuple[LimitEstimate, LimitEstimate]:
        producer = _modified(rule)
        odd_p, odd_s = tables.values(producer, odd_idx)
        even_p, even_s = tables.values(producer, even_idx)
        return (
            estimate_from_values(sub_odd, odd_p, odd_s, precision, tol, depth),
            estimate_from_values(sub_even, even_p, even_s, precision, tol, depth),
        )

    v_par = parities(v_rule)
    w_par = parities(w_rule)
    v_limit = _merge_parities(*v_par, tol, precision)
    w_limit = _merge_parities(*w_par, tol, precision)

    tail_start = depth - window_size(depth, depth) + 1
    separation = min(
        chordal_distance(v_rule(n).to_float(precision), w_rule(n).to_float(precision))
        for n in range(tail_start, depth + 1)
    )
    same_limit = (
        v_limit.converged and w_limit.converged
        and chordal_distance(v_limit.value.to_float(precision), w_limit.value.to_float(precision)) < tol
    )
    if same_limit and v_limit.exact and w_limit.exact:
        same_limit = v_limit.value == w_limit.value
    evidence = bool(same_limit and separation > 0)
    logger.info(
        f"Probe on {cf.name or 'fraction'}: S(v) -> {format_ext(v_limit.value)}, "
        f"S(w) -> {format_ext(w_limit.value)}, evidence {evidence}"
    )
    return ProbeReport(v_limit, w_limit, v_par, w_par, separation, evidence, depth, precision)
