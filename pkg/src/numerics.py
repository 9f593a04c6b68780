"""
Scalar backends for continued-fraction arithmetic.

Two backends are provided and never mixed inside one computation:

* ``ExactComplex``: Gaussian rationals with ``Fraction`` parts, no rounding.
* ``FloatComplex``: binary floating complex numbers at a declared precision,
  evaluated in one mpmath context per precision (round-to-nearest-even).

``ExtComplex`` adds the point at infinity; ``chordal_distance`` and
``chordal_distance_sq`` implement the chordal metric on the Riemann sphere.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Optional, Union

from mpmath import libmp
from mpmath.ctx_mp import MPContext

logger = logging.getLogger(__name__)

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 2


class CfError(Exception):
    """Base class for all library errors"""


class DegenerateFractionError(CfError):
    """A 0/0 approximant or ratio was formed"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message if index is None else f"{message} (index {index})")
        self.index = index


class PrecisionMismatchError(CfError):
    pass


class ZeroPartialNumeratorError(CfError):
    def __init__(self, index: Optional[int] = None):
        where = "" if index is None else f" at index {index}"
        super().__init__(f"Partial numerator vanishes{where}")
        self.index = index


class ZeroFactorError(CfError):
    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message if index is None else f"{message} (index {index})")
        self.index = index


class RepeatedValueError(CfError):
    """Consecutive values coincide where Bernoulli's construction needs them distinct"""

    def __init__(self, index: int):
        super().__init__(f"Consecutive values K_{index - 1} and K_{index} are equal")
        self.index = index


class WrongFormError(CfError):
    pass


class PreconditionError(CfError):
    pass


@lru_cache(maxsize=None)
def float_context(bits: int) -> MPContext:
    """Return the (shared, never mutated) mpmath context for a precision"""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"Precision must be at least {MIN_PRECISION_BITS} bits, got {bits}")
    ctx = MPContext()
    ctx.prec = bits
    return ctx


def _fraction_to_mpf(value: Fraction, bits: int):
    ctx = float_context(bits)
    return ctx.make_mpf(
        libmp.from_rational(value.numerator, value.denominator, bits, libmp.round_nearest)
    )


def _mpf_to_fraction(value) -> Fraction:
    p, q = libmp.to_rational(value._mpf_)
    return Fraction(int(p), int(q))


@dataclass(frozen=True)
class ExactComplex:
    """Gaussian rational re + im*i"""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @property
    def precision_bits(self) -> None:
        return None

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def to_float(self, bits: int) -> "FloatComplex":
        ctx = float_context(bits)
        return FloatComplex(
            ctx.mpc(_fraction_to_mpf(self.re, bits), _fraction_to_mpf(self.im, bits)), bits
        )

    def _coerce(self, other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Rational)):
            return ExactComplex(Fraction(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.abs_sq()
        if den == 0:
            raise ZeroDivisionError("Exact division by zero")
        return ExactComplex(
            (self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return ExactComplex(1) / (self ** -exponent)
        result = ExactComplex(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"ExactComplex({format_scalar(self)})"


@dataclass(frozen=True, eq=False)
class FloatComplex:
    """Binary floating complex number bound to one precision"""

    value: object
    precision_bits: int

    @property
    def context(self) -> MPContext:
        return float_context(self.precision_bits)

    @property
    def re(self):
        return self.value.real

    @property
    def im(self):
        return self.value.imag

    def is_zero(self) -> bool:
        return self.value == 0

    def is_real(self) -> bool:
        return self.value.imag == 0

    def abs_sq(self):
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "FloatComplex":
        return FloatComplex(self.value.conjugate(), self.precision_bits)

    def to_float(self, bits: int) -> "FloatComplex":
        return self.to_precision(bits)

    def to_precision(self, bits: int) -> "FloatComplex":
        if bits == self.precision_bits:
            return self
        ctx = float_context(bits)
        return FloatComplex(ctx.mpc(self.value.real, self.value.imag), bits)

    def to_exact(self) -> ExactComplex:
        return ExactComplex(_mpf_to_fraction(self.re), _mpf_to_fraction(self.im))

    def exponent(self) -> int:
        """Upper bound for log2 |z| (mpmath's mag)"""
        return int(self.context.mag(self.value))

    def scale2(self, e: int) -> "FloatComplex":
        """Multiply by 2**e (exact in binary floating point)"""
        ctx = self.context
        return FloatComplex(self.value * ctx.ldexp(ctx.one, e), self.precision_bits)

    def _coerce(self, other):
        if isinstance(other, FloatComplex):
            if other.precision_bits != self.precision_bits:
                raise PrecisionMismatchError(
                    f"Operands carry {self.precision_bits} and {other.precision_bits} bits"
                )
            return other
        if isinstance(other, ExactComplex):
            return other.to_float(self.precision_bits)
        if isinstance(other, (int, Rational)):
            return ExactComplex(Fraction(other)).to_float(self.precision_bits)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatComplex(self.value + o.value, self.precision_bits)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatComplex(self.value - o.value, self.precision_bits)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatComplex(o.value - self.value, self.precision_bits)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatComplex(self.value * o.value, self.precision_bits)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("Float division by zero")
        return FloatComplex(self.value / o.value, self.precision_bits)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return FloatComplex(-self.value, self.precision_bits)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        return FloatComplex(self.value ** exponent, self.precision_bits)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except PrecisionMismatchError:
            return False
        if o is None:
            return NotImplemented
        return self.value == o.value

    def __hash__(self):
        return hash((self.precision_bits, self.value))

    def __repr__(self):
        return f"FloatComplex({format_scalar(self)}, {self.precision_bits} bits)"


Scalar = Union[ExactComplex, FloatComplex]


def to_scalar(x) -> Scalar:
    """Coerce ints, Fractions, Python floats/complex and strings into a backend scalar"""
    if isinstance(x, (ExactComplex, FloatComplex)):
        return x
    if isinstance(x, bool):
        raise TypeError("Booleans are not scalars")
    if isinstance(x, (int, Rational)):
        return ExactComplex(Fraction(x))
    if isinstance(x, float):
        return ExactComplex(Fraction(x))
    if isinstance(x, complex):
        return ExactComplex(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, str):
        return parse_complex(x)
    raise TypeError(f"Cannot interpret {type(x).__name__} as a scalar")


def is_zero(x) -> bool:
    return to_scalar(x).is_zero()


def one_like(x: Scalar) -> Scalar:
    if isinstance(x, FloatComplex):
        return ExactComplex(1).to_float(x.precision_bits)
    return ExactComplex(1)


def zero_like(x: Scalar) -> Scalar:
    if isinstance(x, FloatComplex):
        return ExactComplex(0).to_float(x.precision_bits)
    return ExactComplex(0)


def precision_of(*values) -> Optional[int]:
    """Common float precision of the operands (None when all are exact)"""
    bits = None
    for v in values:
        if isinstance(v, ExtComplex):
            v = v.value
        if isinstance(v, FloatComplex):
            if bits is not None and bits != v.precision_bits:
                raise PrecisionMismatchError(
                    f"Operands carry {bits} and {v.precision_bits} bits"
                )
            bits = v.precision_bits
    return bits


@dataclass(frozen=True)
class ExtComplex:
    """Point of the extended complex plane; ``value is None`` is the point at infinity"""

    value: Optional[Scalar] = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def to_float(self, bits: int) -> "ExtComplex":
        if self.value is None:
            return self
        return ExtComplex(self.value.to_float(bits))

    def __eq__(self, other):
        if not isinstance(other, ExtComplex):
            if self.value is None:
                return False
            return self.value == other
        if self.value is None or other.value is None:
            return self.value is None and other.value is None
        return self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return "Infinity" if self.value is None else f"Finite({format_scalar(self.value)})"


INFINITY = ExtComplex(None)


def Finite(value) -> ExtComplex:
    return ExtComplex(to_scalar(value))


def as_ext(value) -> ExtComplex:
    if isinstance(value, ExtComplex):
        return value
    return Finite(value)


def ext_div(num, den) -> ExtComplex:
    """num/den on the Riemann sphere; 0/0 is a degenerate fraction"""
    num = to_scalar(num)
    den = to_scalar(den)
    if den.is_zero():
        if num.is_zero():
            raise DegenerateFractionError("Indeterminate 0/0")
        return INFINITY
    return ExtComplex(num / den)


def chordal_distance(w, z, precision_bits: Optional[int] = None):
    """Chordal distance on the Riemann sphere, evaluated in the float backend

    The precision is taken from float operands; exact operands are rounded to it.
    """
    w = as_ext(w)
    z = as_ext(z)
    bits = precision_of(w, z)
    if bits is None:
        bits = precision_bits or DEFAULT_PRECISION_BITS
    elif precision_bits is not None and precision_bits != bits:
        raise PrecisionMismatchError(f"Operands carry {bits} bits, {precision_bits} requested")
    ctx = float_context(bits)

    if w.is_infinite and z.is_infinite:
        return ctx.zero
    if w.is_infinite or z.is_infinite:
        finite = (z if w.is_infinite else w).value.to_float(bits)
        return ctx.one / ctx.sqrt(1 + finite.abs_sq())

    fw = w.value.to_float(bits)
    fz = z.value.to_float(bits)
    d = abs(fz.value - fw.value) / (ctx.sqrt(1 + fw.abs_sq()) * ctx.sqrt(1 + fz.abs_sq()))
    return min(d, ctx.one)


def chordal_distance_sq(w, z) -> Fraction:
    """Square of the chordal distance, exact for exact operands"""
    w = as_ext(w)
    z = as_ext(z)
    for point in (w, z):
        if point.is_finite and not isinstance(point.value, ExactComplex):
            raise TypeError("chordal_distance_sq needs exact operands")
    if w.is_infinite and z.is_infinite:
        return Fraction(0)
    if w.is_infinite or z.is_infinite:
        finite = z.value if w.is_infinite else w.value
        return 1 / (1 + finite.abs_sq())
    return (z.value - w.value).abs_sq() / ((1 + w.value.abs_sq()) * (1 + z.value.abs_sq()))


def decimal_digits(bits: int) -> int:
    return libmp.prec_to_dps(bits)


def agreed_digits(x, y, bits: int) -> int:
    """Number of decimal digits on which two estimates agree (chordal metric)"""
    cap = decimal_digits(bits)
    d = chordal_distance(as_ext(x).to_float(bits), as_ext(y).to_float(bits))
    if d == 0:
        return cap
    ctx = float_context(bits)
    return max(0, min(cap, int(ctx.floor(-ctx.log10(d)))))


# --- serialization -------------------------------------------------------

def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _shortest_decimal(x, bits: int) -> str:
    """Shortest decimal string that reads back to x at ``bits`` precision"""
    mpf_value = x._mpf_
    if mpf_value == libmp.fzero:
        return "0"
    lo, hi = 1, libmp.repr_dps(bits)
    while lo < hi:
        mid = (lo + hi) // 2
        if libmp.from_str(libmp.to_str(mpf_value, mid), bits, libmp.round_nearest) == mpf_value:
            hi = mid
        else:
            lo = mid + 1
    return libmp.to_str(mpf_value, lo)


def _join_complex(re_text: str, im_text: str, im_is_zero: bool, re_is_zero: bool) -> str:
    if im_is_zero:
        return re_text
    if re_is_zero:
        return f"{im_text}i"
    if im_text.startswith("-"):
        return f"{re_text}-{im_text[1:]}i"
    return f"{re_text}+{im_text}i"


def format_scalar(x) -> str:
    x = to_scalar(x)
    if isinstance(x, ExactComplex):
        return _join_complex(
            format_fraction(x.re), format_fraction(x.im), x.im == 0, x.re == 0
        )
    bits = x.precision_bits
    return _join_complex(
        _shortest_decimal(x.re, bits), _shortest_decimal(x.im, bits), x.im == 0, x.re == 0
    )


def format_ext(x) -> str:
    x = as_ext(x)
    return "inf" if x.is_infinite else format_scalar(x.value)


def format_real(x, bits: int = DEFAULT_PRECISION_BITS) -> str:
    """Format a real number (Fraction, int or mpf) for reports"""
    if isinstance(x, (int, Rational)):
        return format_fraction(Fraction(x))
    ctx = float_context(bits)
    return _shortest_decimal(ctx.mpf(x), bits)


_REAL = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_REAL})?(?:(?P<isign>[+-])?(?P<im>{_REAL})?(?P<i>i))?$"
)


def _parse_real(token: str, bits: Optional[int]) -> Fraction:
    if "/" in token:
        num, den = token.split("/")
        if not re.fullmatch(r"[+-]?\d+", num):
            raise ValueError(f"Rational parts must be integers: '{token}'")
        if int(den) == 0:
            raise ValueError(f"Zero denominator in '{token}'")
        return Fraction(int(num), int(den))
    value = Fraction(token)
    if bits is not None and not re.fullmatch(r"[+-]?\d+", token):
        # decimals become the nearest binary float at the declared precision
        value = _mpf_to_fraction(_fraction_to_mpf(value, bits))
    return value


def parse_complex(text: str, bits: Optional[int] = None) -> ExactComplex:
    """Parse 'a', 'bi', 'a+bi' with rational or decimal parts

    Rationals are exact; decimals are rounded to binary floats of ``bits``
    precision when given (the result is still an exact dyadic rational).
    """
    compact = "".join(str(text).split())
    match = _COMPLEX_RE.match(compact)
    if not compact or match is None:
        raise ValueError(f"Cannot parse complex literal '{text}'")
    re_tok, isign, im_tok, i_tok = match.group("re", "isign", "im", "i")
    if i_tok and isign is None and im_tok is None and re_tok is not None:
        # the only number present is the imaginary coefficient, e.g. '2i' or '-3/2i'
        re_tok, im_tok, isign = None, re_tok.lstrip("+-") or "1", "-" if re_tok.startswith("-") else "+"
    if re_tok is None and not i_tok:
        raise ValueError(f"Cannot parse complex literal '{text}'")
    re_part = _parse_real(re_tok, bits) if re_tok else Fraction(0)
    im_part = Fraction(0)
    if i_tok:
        im_part = _parse_real(im_tok, bits) if im_tok else Fraction(1)
        if isign == "-":
            im_part = -im_part
    return ExactComplex(re_part, im_part)


def parse_ext(text: str, bits: Optional[int] = None) -> ExtComplex:
    if str(text).strip().lower() in ("inf", "infinity", "oo", "∞"):
        return INFINITY
    return ExtComplex(parse_complex(text, bits))

