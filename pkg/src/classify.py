"""
Convergence and divergence analysis of continued fractions

Verdicts are values: a failed hypothesis or a missing limit yields
``Inconclusive`` with the reason, never an exception. Exceptions are reserved
for violated preconditions and degenerate fractions.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.cf_core import (
    ApproximantTable,
    CoefficientSource,
    convergents,
    denominator_ratio,
)
from src.limits import (
    DEFAULT_PRECISION_BITS,
    EXTRA_BITS,
    START_DEPTH,
    LimitEstimate,
    estimate_from_values,
    estimate_subsequence_limits,
    general_convergence_probe,
    limits_distinct,
)
from src.numerics import (
    ExtComplex,
    FloatComplex,
    PreconditionError,
    Scalar,
    float_context,
    format_ext,
    format_real,
    format_scalar,
    to_scalar,
)
from src.qcf import (
    GENERAL,
    UNIT_DENOMINATOR,
    DegreeProfile,
    DegreeViolation,
    FamilyOrigin,
    QFamily,
    degree_profile,
    instantiate,
)
from src.qpolynomial import QPolynomial
from src.transforms import to_unit_denominator, to_unit_numerator

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 0.1
DEFAULT_RHO_MAX = 0.9
DEFAULT_BOUND_DEPTH = 256
THEOREM5_BOUND = 1e3
DOMINANCE_SEARCH_LIMIT = 10000

CERTIFIED = "certified (symbolic bounds + numeric limit distinctness)"
NUMERIC_ONLY = "numeric evidence only"


def _magnitude(x: Scalar, bits: int):
    x = to_scalar(x)
    if not isinstance(x, FloatComplex) or x.precision_bits != bits:
        x = x.to_float(bits)
    return abs(x.value)


def _real(x, bits: int) -> str:
    return format_real(x, bits)


# --- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class BoundCertificate:
    c1: Any
    c2: Any
    c3: Any
    window: Tuple[int, Optional[int]]
    mode: str
    precision_bits: int = DEFAULT_PRECISION_BITS

    def to_dict(self) -> Dict[str, Any]:
        start, end = self.window
        return {
            "c1": _real(self.c1, self.precision_bits),
            "c2": _real(self.c2, self.precision_bits),
            "c3": _real(self.c3, self.precision_bits),
            "window": {"start": start, "end": end},
            "mode": self.mode,
        }


class Verdict:
    kind = "verdict"

    def payload(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        result = {"verdict": self.kind}
        result.update(self.payload())
        return result


@dataclass(frozen=True)
class ConvergesEvidence(Verdict):
    limit: LimitEstimate
    kind = "ConvergesEvidence"

    def payload(self):
        return {"limit": self.limit.to_dict()}


@dataclass(frozen=True)
class OddEvenDistinct(Verdict):
    f1: LimitEstimate
    f2: LimitEstimate
    reason: str = ""
    kind = "OddEvenDistinct"

    def payload(self):
        return {"f1": self.f1.to_dict(), "f2": self.f2.to_dict(), "reason": self.reason}


@dataclass(frozen=True)
class RatioDiagnostics:
    """r_n = B_n/B_(n-1) over a tail and the residuals of r_(n-1)(r_n - b_n) = a_n"""

    ratios: List[Tuple[int, ExtComplex]]
    max_residual: Any
    even_trend: float
    odd_trend: float
    exact: bool
    precision_bits: int = DEFAULT_PRECISION_BITS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tail_ratios": [[n, format_ext(r)] for n, r in self.ratios[-4:]],
            "max_residual": (format_scalar(self.max_residual) if self.exact
                             else _real(self.max_residual, self.precision_bits)),
            "even_log_trend": f"{self.even_trend:.6g}",
            "odd_log_trend": f"{self.odd_trend:.6g}",
        }


@dataclass(frozen=True)
class GenerallyDivergent(Verdict):
    certificate: BoundCertificate
    f1: LimitEstimate
    f2: LimitEstimate
    transformed: bool = False
    diagnostics: Optional[RatioDiagnostics] = None
    kind = "GenerallyDivergent"

    @property
    def wording(self) -> str:
        return CERTIFIED if self.certificate.mode == "symbolic" else NUMERIC_ONLY

    def payload(self):
        result = {
            "certificate": self.certificate.to_dict(),
            "f1": self.f1.to_dict(),
            "f2": self.f2.to_dict(),
            "status": self.wording,
            "unit_denominator_transform": self.transformed,
        }
        if self.diagnostics is not None:
            result["ratio_diagnostics"] = self.diagnostics.to_dict()
        return result


@dataclass(frozen=True)
class SternStolzDivergent(Verdict):
    series_sum: Any
    P0: ExtComplex
    P1: ExtComplex
    Q0: ExtComplex
    Q1: ExtComplex
    residual: Any
    lag: int
    rho: Any
    window: Tuple[int, int]
    depth: int
    precision_bits: int = DEFAULT_PRECISION_BITS
    kind = "SternStolzDivergent"

    def payload(self):
        bits = self.precision_bits
        return {
            "series_sum": _real(self.series_sum, bits),
            "P0": format_ext(self.P0),
            "P1": format_ext(self.P1),
            "Q0": format_ext(self.Q0),
            "Q1": format_ext(self.Q1),
            "determinant_residual": _real(self.residual, bits),
            "ratio_lag": self.lag,
            "rho": _real(self.rho, bits),
            "window": {"start": self.window[0], "end": self.window[1]},
            "depth": self.depth,
        }


@dataclass(frozen=True)
class TrichotomyCase(Verdict):
    case: str
    exceptional: bool
    profile: DegreeProfile
    q: Scalar
    limits: Optional[Tuple[LimitEstimate, LimitEstimate]] = None
    theorem2: Optional[Verdict] = None
    kind = "TrichotomyCase"

    def payload(self):
        result = {
            "case": self.case,
            "exceptional": self.exceptional,
            "profile": self.profile.to_dict(),
            "q": format_scalar(self.q),
            "converges_outside_unit_circle": self.case == "2b>a" or (self.case == "2b=a" and not self.exceptional),
        }
        if self.limits is not None:
            result["odd_limit"] = self.limits[0].to_dict()
            result["even_limit"] = self.limits[1].to_dict()
        if self.theorem2 is not None:
            result["theorem2"] = self.theorem2.to_dict()
        return result


@dataclass(frozen=True)
class Theorem5Consistent(Verdict):
    minima: List[Tuple[int, Any]]
    bound: float
    depth: int
    precision_bits: int = DEFAULT_PRECISION_BITS
    kind = "Theorem5Consistent"

    def payload(self):
        return {
            "window_minima": [[start, _real(m, self.precision_bits)] for start, m in self.minima],
            "bound": _real(self.bound, self.precision_bits),
            "depth": self.depth,
        }


@dataclass(frozen=True)
class Theorem5Violation(Verdict):
    index: int
    minima: List[Tuple[int, Any]] = field(default_factory=list)
    precision_bits: int = DEFAULT_PRECISION_BITS
    kind = "Theorem5Violation"

    def payload(self):
        return {
            "index": self.index,
            "window_minima": [[start, _real(m, self.precision_bits)] for start, m in self.minima],
        }


@dataclass(frozen=True)
class Inconclusive(Verdict):
    reason: str
    hypothesis: Optional[str] = None
    index: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)
    kind = "Inconclusive"

    def payload(self):
        result = {"reason": self.reason, "hypothesis": self.hypothesis, "index": self.index}
        result.update(self.details)
        return result


# --- ratio diagnostics ---------------------------------------------------------

def _log_trend(values: Sequence[float]) -> float:
    """Slope of a least-squares line through log|r| (0.0 when too few finite points)"""
    points = [(i, np.log(v)) for i, v in enumerate(values) if 0 < v < np.inf]
    if len(points) < 2:
        return 0.0
    xs, ys = zip(*points)
    slope, _ = np.polyfit(np.array(xs, dtype=float), np.array(ys, dtype=float), 1)
    return float(slope)


def ratio_diagnostics(cf: CoefficientSource, depth: int = 64,
                      precision: int = DEFAULT_PRECISION_BITS) -> RatioDiagnostics:
    """Denominator ratios and the residuals of their defining recurrence"""
    depth = cf.available(depth)
    exact = cf.precision_bits is None
    ratios: List[Tuple[int, ExtComplex]] = []
    residual_max = None
    previous: Optional[ExtComplex] = None
    for state in convergents(cf, depth):
        r = denominator_ratio(state)
        ratios.append((state.n, r))
        if previous is not None and previous.is_finite and r.is_finite:
            pq = cf.coefficient(state.n)
            residual = previous.value * (r.value - pq.b) - pq.a
            size = residual.abs_sq() if exact else _magnitude(residual, residual.precision_bits)
            if residual_max is None or size > (residual_max.abs_sq() if exact else residual_max):
                residual_max = residual if exact else size
        previous = r

    def magnitudes(parity: int) -> List[float]:
        tail = [r for n, r in ratios[len(ratios) // 2:] if n % 2 == parity]
        return [np.inf if r.is_infinite else float(_magnitude(r.value, 64)) for r in tail]

    if residual_max is None:
        residual_max = to_scalar(0) if exact else 0
    return RatioDiagnostics(ratios, residual_max, _log_trend(magnitudes(0)), _log_trend(magnitudes(1)),
                            exact, precision)


# --- Stern-Stolz -----------------------------------------------------------------

def _geometric_certificate(mags: Sequence[Any], lo: int, hi: int, rho_max: float):
    """(lag, rho) of the first lag in {1, 2} whose ratio bound holds over [lo, hi], else None"""
    for lag in (1, 2):
        worst = None
        for n in range(lo, hi - lag + 1):
            if mags[n - 1] == 0:
                worst = None
                break
            ratio = mags[n + lag - 1] / mags[n - 1]
            worst = ratio if worst is None or ratio > worst else worst
        if worst is not None and worst <= rho_max:
            return lag, worst
    return None


def stern_stolz(
    cf: CoefficientSource,
    window: Optional[Tuple[int, int]] = None,
    tol: float = 1e-30,
    precision: int = DEFAULT_PRECISION_BITS,
    rho_max: float = DEFAULT_RHO_MAX,
    max_depth: int = 4096,
) -> Verdict:
    """General divergence of b_0 + K 1/b'_n from a geometric bound on sum |b'_n|"""
    unit = to_unit_numerator(cf)
    tables = [ApproximantTable(unit.at_precision(precision)),
              ApproximantTable(unit.at_precision(precision + EXTRA_BITS))]
    primary = tables[0].cf
    depth = window[1] + 1 if window is not None else min(START_DEPTH, max_depth)
    if unit.length is not None and unit.length < 4:
        return Inconclusive("fraction too short for a series certificate", "series")

    while True:
        depth = unit.available(depth)
        depth -= depth % 2
        mags = [_magnitude(primary.coefficient(n).b, precision) for n in range(1, depth + 1)]
        lo, hi = window if window is not None else (depth // 2, depth)
        if hi > depth:
            return Inconclusive(f"window end {hi} runs past the {depth} available partial quotients", "series",
                                details={"window": {"start": lo, "end": hi}, "available": depth})
        certificate = _geometric_certificate(mags, lo, hi, rho_max)
        if certificate is None:
            logger.warning(f"No geometric ratio certificate for {cf.name or 'fraction'} over [{lo}, {hi}]")
            return Inconclusive("no geometric ratio bound rho <= rho_max over the window", "series",
                                details={"window": {"start": lo, "end": hi}, "rho_max": str(rho_max)})
        lag, rho = certificate
        partial = sum(mags[:hi])
        tail = sum(mags[hi - lag:hi]) * rho / (1 - rho)

        odd_idx = list(range(1, depth, 2))
        even_idx = list(range(2, depth + 1, 2))
        estimates = {}
        for label, idx, attr in (("P0", even_idx, "A_curr"), ("Q0", even_idx, "B_curr"),
                                 ("P1", odd_idx, "A_curr"), ("Q1", odd_idx, "B_curr")):
            lists = [[ExtComplex(getattr(t.state(n), attr)) for n in idx] for t in tables]
            estimates[label] = estimate_from_values(
                [(n + 1) // 2 for n in idx], lists[0], lists[1], precision, tol, depth
            )
        if all(e.converged for e in estimates.values()) and not any(
            t.state(depth).scale_exponent for t in tables
        ):
            break
        if depth >= unit.available(max_depth) or window is not None:
            return Inconclusive("Stern-Stolz limits P_p, Q_p did not converge", "limits",
                                details={"depth": depth})
        depth = min(2 * depth, max_depth)

    P0, Q0, P1, Q1 = (estimates[k].value for k in ("P0", "Q0", "P1", "Q1"))
    if any(v.is_infinite for v in (P0, Q0, P1, Q1)):
        return Inconclusive("Stern-Stolz limits are not finite", "limits")
    residual = _magnitude(P1.value * Q0.value - P0.value * Q1.value - 1, precision)
    logger.info(
        f"Stern-Stolz on {cf.name or 'fraction'}: lag {lag}, rho {float(rho):.3g}, "
        f"residual {float(residual):.3g}"
    )
    return SternStolzDivergent(partial + tail, P0, P1, Q0, Q1, residual, lag, rho, (lo, hi), depth, precision)


# --- Theorem 2 ---------------------------------------------------------------------

def _dominance(p: QPolynomial, q_abs, ctx) -> Tuple[int, Any]:
    """(n0, eps): for n >= n0 the non-leading terms of p(q^n) sum below eps * |leading term|"""
    (dq, dx), lead = p.leading_monomial()
    others = p.terms[1:]
    for n in range(DOMINANCE_SEARCH_LIMIT):
        rel = sum(abs(c) * q_abs ** ((dq2 - dq) + n * (dx2 - dx)) for (dq2, dx2), c in others)
        rel = ctx.mpf(rel) / abs(lead)
        if rel < ctx.mpf(1) / 2:
            return n, rel
    return -1, None


def _symbolic_certificate(origin: FamilyOrigin, profile: DegreeProfile, working: CoefficientSource,
                          bits: int) -> Optional[BoundCertificate]:
    family = origin.family
    ctx = float_context(bits)
    q_abs = _magnitude(origin.q, bits)
    eps_a, tail_a = ctx.zero, 1
    for p in family.f:
        n0, eps = _dominance(p, q_abs, ctx)
        if eps is None:
            return None
        eps_a = max(eps_a, eps)
        tail_a = max(tail_a, n0 * family.k + 1)
    if profile.form == UNIT_DENOMINATOR:
        bound = q_abs ** profile.C3 * (1 + eps_a) / (1 - eps_a)
        tail = tail_a
    else:
        eps_b, tail_b = ctx.zero, 0
        for p in family.g:
            n0, eps = _dominance(p, q_abs, ctx)
            if eps is None:
                return None
            eps_b = max(eps_b, eps)
            tail_b = max(tail_b, n0 * family.k)
        bound = (q_abs ** (profile.a - 2 * profile.b)
                 * (1 + eps_a) * (1 + eps_b) / ((1 - eps_a) * (1 - eps_b)))
        tail = max(tail_a, tail_b + 1)
    # finite prefix before the dominance argument applies
    for i in range(1, tail // 2 + 2):
        ratio = _magnitude(working.coefficient(2 * i + 1).a, bits) / _magnitude(working.coefficient(2 * i).a, bits)
        bound = max(bound, ratio)
    logger.debug(f"Symbolic bound for {family.name}: tail from index {tail}, c3 {float(bound):.6g}")
    one = ctx.one
    return BoundCertificate(one, one, bound, (tail, None), "symbolic", bits)


def _window_magnitudes(cf: CoefficientSource, depth: int, bits: int, attr: str) -> List[Any]:
    return [_magnitude(getattr(cf.coefficient(n), attr), bits) for n in range(1, depth + 1)]


def _denominator_behaviour(mags: Sequence[Any]) -> Tuple[str, Optional[int]]:
    """'bounded', 'unbounded' or 'vanishing' from the trend of the lower and upper envelopes"""
    half = len(mags) // 2
    first, second = mags[:half], mags[half:]
    if not first or not second:
        return "bounded", None
    low1, low2 = min(first), min(second)
    high1, high2 = max(first), max(second)
    if low2 == 0 or low2 < low1 / 2:
        floor = low1 / 2
        index = next(half + i + 1 for i, m in enumerate(second) if m < floor or m == 0)
        return "vanishing", index
    if low2 > 2 * low1 and high2 > 2 * high1:
        return "unbounded", None
    return "bounded", None


def theorem2_certify(
    cf: CoefficientSource,
    tol: float = 1e-30,
    precision: int = DEFAULT_PRECISION_BITS,
    max_depth: int = 4096,
    margin: float = DEFAULT_MARGIN,
    bound_depth: int = DEFAULT_BOUND_DEPTH,
    limits: Optional[Tuple[LimitEstimate, LimitEstimate]] = None,
    exact: bool = False,
) -> Verdict:
    """Certify general divergence: (con1), (con2a), converged and distinct odd/even limits

    (con1) is checked on the fraction as given. Partial denominators tending to zero fail it
    there; the unit-denominator transform is only tried when they grow without bound.
    """
    depth = cf.available(bound_depth)
    if depth < 4:
        return Inconclusive("fraction too short for bound certification", "con1")
    b_mags = _window_magnitudes(cf, depth, precision, "b")
    behaviour, index = _denominator_behaviour(b_mags)
    if behaviour == "vanishing":
        logger.warning(f"(con1) fails for {cf.name or 'fraction'}: |b_n| tends to zero near index {index}")
        return Inconclusive("partial denominators are not bounded away from zero", "con1", index)

    transformed = behaviour == "unbounded"
    working = to_unit_denominator(cf) if transformed else cf
    if transformed:
        logger.info(f"Applying the unit-denominator transform to {cf.name or 'fraction'}")

    certificate = None
    origin = cf.origin if isinstance(cf.origin, FamilyOrigin) else None
    if origin is not None and _magnitude(origin.q, precision) >= 1 + margin:
        profile = degree_profile(origin.family)
        general = origin.family.form == GENERAL
        if isinstance(profile, DegreeProfile) and (transformed or not general):
            certificate = _symbolic_certificate(origin, profile, working, precision)

    if certificate is None:
        mags = _window_magnitudes(working, depth, precision, "b")
        c1, c2 = min(mags), max(mags)
        if c1 == 0:
            return Inconclusive("a partial denominator vanishes in the window", "con1",
                                next(i + 1 for i, m in enumerate(mags) if m == 0))
        a_mags = _window_magnitudes(working, depth - (depth + 1) % 2, precision, "a")
        ratios = [a_mags[2 * i] / a_mags[2 * i - 1] for i in range(1, (len(a_mags) - 1) // 2 + 1)]
        half = len(ratios) // 2
        if half and max(ratios[half:]) > 2 * max(ratios[:half]):
            grow = next(i for i in range(half, len(ratios)) if ratios[i] > 2 * max(ratios[:half]))
            return Inconclusive("|a_(2i+1)/a_(2i)| grows over the window", "con2a", 2 * grow + 3)
        certificate = BoundCertificate(c1, c2, max(ratios), (1, depth), "numeric", precision)

    if limits is None:
        limits = estimate_subsequence_limits(cf, precision, tol, max_depth, exact)
    f1, f2 = limits
    if not (f1.converged and f2.converged):
        return Inconclusive("odd/even limits did not converge", "limits-converged",
                            details={"certificate": certificate.to_dict(),
                                     "f1": f1.to_dict(), "f2": f2.to_dict()})
    if not limits_distinct(f1, f2, tol, precision):
        return Inconclusive("odd and even limits coincide", "limits-distinct",
                            details={"certificate": certificate.to_dict(),
                                     "f1": f1.to_dict(), "f2": f2.to_dict()})
    diagnostics = ratio_diagnostics(cf.at_precision(precision) if not exact else cf, 64, precision)
    return GenerallyDivergent(certificate, f1, f2, transformed, diagnostics)


# --- Theorem T:p2 trichotomy ---------------------------------------------------------

def _exceptional(q: Scalar, profile: DegreeProfile) -> bool:
    """q^(b - r1 + 2 r2) in [-4 L_a / L_b^2, 0), or (0, -4 L_a / L_b^2] when L_a < 0"""
    exponent = profile.b - profile.r1 + 2 * profile.r2
    value = q ** exponent
    if not value.is_real():
        return False
    limit = Fraction(-4 * profile.L_a, profile.L_b ** 2)
    re = value.re
    if isinstance(value, FloatComplex):
        limit = to_scalar(limit).to_float(value.precision_bits).re
    if profile.L_a > 0:
        return limit <= re < 0
    return 0 < re <= limit


def classify_tp2(
    family: QFamily,
    q,
    tol: float = 1e-30,
    precision: int = DEFAULT_PRECISION_BITS,
    max_depth: int = 4096,
    exact: bool = False,
) -> TrichotomyCase:
    """Case split on 2b versus a for a general-form family at |q| > 1"""
    if family.form != GENERAL:
        raise PreconditionError(f"{family.name} is not a general-form family")
    profile = degree_profile(family)
    if isinstance(profile, DegreeViolation):
        raise PreconditionError(
            f"{family.name} violates the degree conditions: {profile.reason} "
            f"at indices {profile.first_index}, {profile.second_index}"
        )
    q = to_scalar(q)
    if q.abs_sq() <= 1:
        raise PreconditionError("The trichotomy applies only for |q| > 1")

    if 2 * profile.b > profile.a:
        case = "2b>a"
    elif 2 * profile.b == profile.a:
        case = "2b=a"
    else:
        case = "2b<a"
    exceptional = case == "2b=a" and _exceptional(q, profile)
    limits = verdict = None
    if case == "2b<a":
        cf = instantiate(family, q)
        limits = estimate_subsequence_limits(cf, precision, tol, max_depth, exact)
        verdict = theorem2_certify(cf, tol, precision, max_depth, limits=limits, exact=exact)
    logger.info(f"{family.name} at q={format_scalar(q)}: case {case}, exceptional {exceptional}")
    return TrichotomyCase(case, exceptional, profile, q, limits, verdict)


# --- Theorem 5 ---------------------------------------------------------------------

def theorem5_monitor(
    cf: CoefficientSource,
    depth: int = DEFAULT_BOUND_DEPTH,
    bound: float = THEOREM5_BOUND,
    tol: float = 1e-30,
    precision: int = DEFAULT_PRECISION_BITS,
    max_depth: int = 4096,
    limits: Optional[Tuple[LimitEstimate, LimitEstimate]] = None,
    exact: bool = False,
) -> Verdict:
    """Check that |a_n| -> infinity for a generally divergent fraction b_0 + K a_n/1"""
    depth = cf.available(depth)
    if limits is None:
        limits = estimate_subsequence_limits(cf, precision, tol, max_depth, exact)
    f1, f2 = limits
    if not (f1.converged and f2.converged):
        raise PreconditionError("Odd/even limits did not converge")
    if not limits_distinct(f1, f2, tol, precision):
        raise PreconditionError("Odd and even limits coincide")

    working = cf
    if any(cf.coefficient(n).b != 1 for n in range(1, depth + 1)):
        working = to_unit_denominator(cf)
    mags = _window_magnitudes(working, depth, precision, "a")
    minima: List[Tuple[int, Any]] = []
    start = 1
    while start <= depth:
        minima.append((start, min(mags[start - 1:])))
        start *= 2
    if len(minima) < 3:
        raise PreconditionError(f"Depth {depth} is too small for three dyadic windows")
    last = [m for _, m in minima[-3:]]
    if last[0] < last[1] < last[2] and last[2] > bound:
        return Theorem5Consistent(minima, bound, depth, precision)
    window_start = minima[-1][0]
    tail = mags[window_start - 1:]
    index = window_start + tail.index(min(tail))
    logger.warning(f"Bounded |a_n| near index {index} while odd/even limits differ")
    return Theorem5Violation(index, minima, precision)


# --- dispatch --------------------------------------------------------------------------

def classify_family(
    family: QFamily,
    q,
    tol: float = 1e-30,
    precision: int = DEFAULT_PRECISION_BITS,
    max_depth: int = 4096,
    exact: bool = False,
) -> Verdict:
    """Unit-denominator families go through Theorem 2, general ones through the trichotomy"""
    if family.form == GENERAL:
        return classify_tp2(family, q, tol, precision, max_depth, exact)
    cf = instantiate(family, q)
    limits = estimate_subsequence_limits(cf, precision, tol, max_depth, exact)
    verdict = theorem2_certify(cf, tol, precision, max_depth, limits=limits, exact=exact)
    f1, f2 = limits
    if isinstance(verdict, Inconclusive) and f1.converged and f2.converged:
        if not limits_distinct(f1, f2, tol, precision):
            return ConvergesEvidence(f2)
        return OddEvenDistinct(f1, f2, verdict.reason)
    return verdict


def probe_verdict(cf: CoefficientSource, v="1", w="2", depth: int = 1000,
                  precision: int = DEFAULT_PRECISION_BITS, tol: float = 1e-30, exact: bool = False):
    """Probe report plus a verdict summarising it"""
    report = general_convergence_probe(cf, v, w, depth, precision, tol, exact)
    if report.evidence:
        return report, ConvergesEvidence(report.v_limit)
    return report, Inconclusive("no evidence of general convergence", "probe")
