"""
Polynomial q-continued-fraction families

A family with period k is given by polynomials f_1..f_k (and g_0..g_{k-1} in
general form) in Z[q][x]; the fraction at q has

    a_{nk+s}(q) = f_s(q^n),    b_{nk+s-1}(q) = g_{s-1}(q^n)

and b_n = 1 for the unit-denominator form.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from src.cf_core import CoefficientSource, PartialQuotient, rule_source
from src.numerics import CfError, FloatComplex, Scalar, one_like, to_scalar
from src.qpolynomial import QPolynomial, format_polynomial, parse_polynomial

logger = logging.getLogger(__name__)

UNIT_DENOMINATOR = "unit-denominator"
GENERAL = "general"
FORMS = (UNIT_DENOMINATOR, GENERAL)


class UnknownFamilyError(CfError):
    pass


class FamilyFormatError(CfError):
    pass


@dataclass(frozen=True)
class QFamily:
    name: str
    form: str
    k: int
    f: Tuple[QPolynomial, ...]
    g: Tuple[QPolynomial, ...] = ()
    b0: Optional[QPolynomial] = None

    def __post_init__(self):
        if self.form not in FORMS:
            raise FamilyFormatError(f"Unknown form '{self.form}', expected one of {FORMS}")
        if self.k < 1:
            raise FamilyFormatError(f"Period k must be positive, got {self.k}")
        if len(self.f) != self.k:
            raise FamilyFormatError(f"Expected {self.k} numerator polynomials, got {len(self.f)}")
        if any(p.is_zero() for p in self.f):
            raise FamilyFormatError("Numerator polynomials must be nonzero")
        if self.form == GENERAL:
            if len(self.g) != self.k:
                raise FamilyFormatError(f"Expected {self.k} denominator polynomials, got {len(self.g)}")
            implied = QPolynomial.from_terms({(d, 0): c for d, c in self.g[0].specialize(0).items()})
            if self.b0 is None:
                object.__setattr__(self, "b0", implied)
            elif self.b0 != implied:
                raise FamilyFormatError(
                    f"b0 = {format_polynomial(self.b0)} differs from g_0(1) = {format_polynomial(implied)}"
                )
        else:
            if self.g:
                raise FamilyFormatError("Unit-denominator families take no denominator polynomials")
            if self.b0 is None:
                object.__setattr__(self, "b0", QPolynomial.constant(1))
        if not self.b0.is_q_only:
            raise FamilyFormatError("b0 must be a polynomial in q only")

    def numerator_polynomial(self, index: int) -> Tuple[QPolynomial, int]:
        """(f_s, n) with index = nk + s, 1 <= s <= k"""
        n, s = divmod(index - 1, self.k)
        return self.f[s], n

    def denominator_polynomial(self, index: int) -> Tuple[QPolynomial, int]:
        """(g_t, n) with index = nk + t, 0 <= t < k"""
        n, t = divmod(index, self.k)
        return self.g[t], n


@dataclass(frozen=True)
class FamilyOrigin:
    family: QFamily
    q: Scalar


def instantiate(family: QFamily, q) -> CoefficientSource:
    """Coefficient source of the family at q (exact for Gaussian-rational q)"""
    q = to_scalar(q)
    if q.is_zero():
        raise ValueError("q must be nonzero")

    def rule(index: int) -> PartialQuotient:
        f, n = family.numerator_polynomial(index)
        a = f.at_power(q, n)
        if family.form == GENERAL:
            g, m = family.denominator_polynomial(index)
            b = g.at_power(q, m)
        else:
            b = one_like(q)
        return PartialQuotient.at_index(a, b, index)

    return CoefficientSource(
        family.b0.at_power(q, 0),
        rule,
        name=family.name,
        origin=FamilyOrigin(family, q),
        reprecision=lambda bits: instantiate(family, q.to_float(bits)),
    )


# --- degree conditions -----------------------------------------------------

@dataclass(frozen=True)
class SequenceDegrees:
    """Degree law of one coefficient sequence e_m = p_{m mod k}(q^(m // k))"""

    first_degree: int
    step: int
    leading: int
    leading_stable_from: int
    threshold: int


@dataclass(frozen=True)
class DegreeProfile:
    form: str
    C3: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    r1: Optional[int] = None
    r2: Optional[int] = None
    L_a: Optional[int] = None
    L_b: Optional[int] = None
    leading_stable_from: Dict[str, int] = field(default_factory=dict)
    threshold: int = 0

    def to_dict(self) -> Dict[str, Any]:
        if self.form == UNIT_DENOMINATOR:
            payload = {"C3": self.C3, "L_a": self.L_a}
        else:
            payload = {"a": self.a, "b": self.b, "r1": self.r1, "r2": self.r2,
                       "L_a": self.L_a, "L_b": self.L_b}
        payload.update({
            "form": self.form,
            "leading_stable_from": dict(self.leading_stable_from),
            "threshold": self.threshold,
        })
        return payload


@dataclass(frozen=True)
class DegreeViolation:
    sequence: str
    first_index: int
    second_index: int
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sequence": self.sequence,
            "indices": [self.first_index, self.second_index],
            "reason": self.reason,
        }


def _cancellation_threshold(p: QPolynomial) -> int:
    """Largest n at which a non-leading term of p can still reach the leading degree"""
    (dq, dx), _ = p.leading_monomial()
    threshold = -1
    for (dq2, dx2), _ in p.terms[1:]:
        if dx2 < dx:
            threshold = max(threshold, (dq2 - dq) // (dx - dx2))
    return threshold


def _sequence_degrees(
    polys: Tuple[QPolynomial, ...], offset: int, label: str
) -> Union[SequenceDegrees, DegreeViolation]:
    """Check deg e_{m+1} = deg e_m + step for all m; indices reported as m + offset"""
    k = len(polys)
    leads = [p.leading_monomial() for p in polys]
    lead_coeffs = [c for _, c in leads]
    for j in range(k - 1):
        if lead_coeffs[j] != lead_coeffs[j + 1]:
            return DegreeViolation(label, offset + j, offset + j + 1, "unequal leading coefficients")
    D = leads[0][0][1]
    for j, ((_, dx), _) in enumerate(leads):
        if dx != D:
            return DegreeViolation(label, offset + j - 1, offset + j, "leading degrees in x differ")
    dqs = [dq for (dq, _), _ in leads]
    step = D // k if D % k == 0 else None
    if step is None or step <= 0:
        return DegreeViolation(label, offset, offset + 1, "degrees do not grow by a positive constant")
    for j in range(k - 1):
        if dqs[j + 1] - dqs[j] != step:
            return DegreeViolation(label, offset + j, offset + j + 1, "degree step differs across the period")

    threshold = max(_cancellation_threshold(p) for p in polys)
    leading = lead_coeffs[0]
    horizon = k * (max(threshold, 0) + 2)
    degrees: List[int] = []
    stable_from = offset
    for m in range(horizon + 1):
        n, j = divmod(m, k)
        spec = polys[j].specialize(n)
        if not spec:
            return DegreeViolation(label, offset + m, offset + m, "coefficient vanishes identically")
        degree = max(spec)
        if degrees and degree - degrees[-1] != step:
            return DegreeViolation(label, offset + m - 1, offset + m, "degree law fails")
        degrees.append(degree)
        if spec[degree] != leading:
            stable_from = offset + m + 1
    logger.debug(f"{label}: step {step}, threshold {threshold}, leading stable from {stable_from}")
    return SequenceDegrees(degrees[0], step, leading, stable_from, threshold)


def degree_profile(family: QFamily) -> Union[DegreeProfile, DegreeViolation]:
    """Validate the degree conditions of a family; violations are returned, not raised"""
    numerators = _sequence_degrees(family.f, 1, "a")
    if isinstance(numerators, DegreeViolation):
        return numerators
    if family.form == UNIT_DENOMINATOR:
        return DegreeProfile(
            form=UNIT_DENOMINATOR,
            C3=numerators.step,
            r1=numerators.first_degree,
            L_a=numerators.leading,
            leading_stable_from={"a": numerators.leading_stable_from},
            threshold=numerators.threshold,
        )
    denominators = _sequence_degrees(family.g, 0, "b")
    if isinstance(denominators, DegreeViolation):
        return denominators
    return DegreeProfile(
        form=GENERAL,
        a=numerators.step,
        b=denominators.step,
        r1=numerators.first_degree,
        r2=denominators.first_degree,
        L_a=numerators.leading,
        L_b=denominators.leading,
        leading_stable_from={"a": numerators.leading_stable_from, "b": denominators.leading_stable_from},
        threshold=max(numerators.threshold, denominators.threshold),
    )


# --- JSON family files ------------------------------------------------------

def _parse_list(doc: Dict[str, Any], key: str) -> Tuple[QPolynomial, ...]:
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise FamilyFormatError(f"'{key}' must be a list of polynomial strings")
    return tuple(parse_polynomial(v) for v in value)


def family_from_dict(doc: Dict[str, Any]) -> QFamily:
    missing = [key for key in ("name", "form", "k", "f") if key not in doc]
    if missing:
        raise FamilyFormatError(f"Family document lacks {', '.join(missing)}")
    if not isinstance(doc["k"], int) or isinstance(doc["k"], bool):
        raise FamilyFormatError("'k' must be an integer")
    b0 = doc.get("b0")
    if b0 is not None and not isinstance(b0, str):
        raise FamilyFormatError("'b0' must be a polynomial string")
    return QFamily(
        name=str(doc["name"]),
        form=doc["form"],
        k=doc["k"],
        f=_parse_list(doc, "f"),
        g=_parse_list(doc, "g"),
        b0=None if b0 is None else parse_polynomial(b0),
    )


def family_to_dict(family: QFamily) -> Dict[str, Any]:
    doc = {
        "name": family.name,
        "form": family.form,
        "k": family.k,
        "b0": format_polynomial(family.b0),
        "f": [format_polynomial(p) for p in family.f],
    }
    if family.form == GENERAL:
        doc["g"] = [format_polynomial(p) for p in family.g]
    return doc


def load_family(path: Union[str, Path]) -> QFamily:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FamilyFormatError(f"{path}: invalid JSON ({e})") from e
    except OSError as e:
        raise FamilyFormatError(f"{path}: cannot read family file ({e})") from e
    if not isinstance(doc, dict):
        raise FamilyFormatError(f"{path}: family document must be a JSON object")
    family = family_from_dict(doc)
    logger.info(f"Loaded family '{family.name}' ({family.form}, k={family.k}) from {path}")
    return family


# --- registry ---------------------------------------------------------------

def _family(name: str, form: str, f: List[str], g: Optional[List[str]] = None, b0: Optional[str] = None) -> QFamily:
    return QFamily(
        name=name,
        form=form,
        k=len(f),
        f=tuple(parse_polynomial(p) for p in f),
        g=tuple(parse_polynomial(p) for p in (g or [])),
        b0=None if b0 is None else parse_polynomial(b0),
    )


_FAMILIES: Dict[str, QFamily] = {
    family.name: family
    for family in (
        _family("rogers-ramanujan", UNIT_DENOMINATOR, ["q*x"]),
        _family("selberg-S1", UNIT_DENOMINATOR, ["q*x^2", "q^2*x^2 + q*x"]),
        _family("selberg-S2", UNIT_DENOMINATOR, ["q^2*x^4 + q*x^2", "q^4*x^4"]),
        _family("selberg-S3", UNIT_DENOMINATOR, ["q^2*x^2 + q*x"]),
        _family("goellnitz-gordon", GENERAL, ["q^2*x^2"], ["q*x^2 + 1"]),
        _family(
            "example3-G1",
            UNIT_DENOMINATOR,
            [
                "q*x^4 + 3*q*x^3 + 2*q*x^2",
                "q^2*x^4 + 2*q^2*x^3 + 7*q*x^2",
                "q^3*x^4 + 5*q^2*x^3 + 2*q^3*x^2",
                "q^4*x^4 + 7*q^3*x^3 + 3*q*x^2 + 2*x",
            ],
        ),
        _family(
            "example4-G2",
            GENERAL,
            [
                "q^3*x^12 + 3*q^2*x^6 + 2*q^2*x^4",
                "q^6*x^12 + 2*q^4*x^6 + 7*q^2*x^4",
                "q^9*x^12 + 5*q^4*x^6 + 2*q^6*x^4",
                "q^12*x^12 + 7*q^6*x^6 + 3*q^2*x^4 + 2*x^2",
            ],
            [
                "q*x^4 + x + 1",
                "q^2*x^4 + x^2 + 1",
                "q^3*x^4 + x^2 + 1",
                "q^4*x^4 + x^3 + 1",
            ],
        ),
    )
}

_ALIASES = {
    "K": "rogers-ramanujan",
    "S1": "selberg-S1",
    "S2": "selberg-S2",
    "S3": "selberg-S3",
    "GG": "goellnitz-gordon",
    "G1": "example3-G1",
    "G2": "example4-G2",
    "G": "example2-G",
}

EXAMPLE2_NAME = "example2-G"


def example2_coefficient(index: int) -> Tuple[Fraction, Fraction]:
    """Partial quotient (a_n, b_n) of the rational-in-n fraction converging generally to 3"""
    if index == 1:
        return Fraction(2), Fraction(1)
    if index == 2:
        return Fraction(-1), Fraction(2)
    n, parity = divmod(index - 1, 2)
    if parity == 0:
        # index = 2n + 1
        return 1 + Fraction(1, 2 * n * n) + Fraction(1, n), Fraction(-1, 2 * n ** 3)
    # index = 2n + 2
    return (
        Fraction(2 * (1 + n) ** 3, n * (1 + 2 * n + 2 * n * n)),
        Fraction(1 + n, 1 + 2 * n + 2 * n * n),
    )


def example2_source() -> CoefficientSource:
    return rule_source(EXAMPLE2_NAME, 0, example2_coefficient)


def registry_names() -> List[str]:
    return sorted(list(_FAMILIES) + [EXAMPLE2_NAME])


def canonical_name(name: str) -> str:
    return _ALIASES.get(name, name)


def registry_lookup(name: str) -> Union[QFamily, CoefficientSource]:
    """Registered family, or for the rule-based entry a fresh coefficient source"""
    key = canonical_name(name)
    if key == EXAMPLE2_NAME:
        return example2_source()
    try:
        return _FAMILIES[key]
    except KeyError:
        raise UnknownFamilyError(
            f"Unknown family '{name}'; known: {', '.join(registry_names())}"
        ) from None


def rogers_ramanujan_value(q, depth: int = 0, bits: int = 256) -> FloatComplex:
    """K(q) for |q| < 1 by truncation; depth 0 picks one deep enough for ``bits``"""
    q = to_scalar(q).to_float(bits)
    ctx = q.context
    r = ctx.fabs(q.value)
    if r >= 1:
        raise ValueError("Truncation of K(q) converges only for |q| < 1")
    if depth <= 0:
        # enough terms that |q|^depth drops below the working precision
        depth = int(ctx.ceil(bits / -ctx.log(r, 2))) + 8 if r > 0 else 1
    if r == 0:
        return FloatComplex(ctx.mpc(1), bits)
    value = ctx.mpc(1)
    power = q.value ** depth
    for _ in range(depth):
        value = 1 + power / value
        power = power / q.value
    return FloatComplex(value, bits)
