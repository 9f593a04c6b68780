"""
Polynomials in Z[q][x] and the text grammar used by family files

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT | VAR ('^' INT)? | '(' expr ')'
    VAR    := 'q' | 'x'
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from src.numerics import CfError, Scalar, to_scalar, zero_like

logger = logging.getLogger(__name__)

# (deg_q, deg_x) -> coefficient
Terms = Dict[Tuple[int, int], int]


class PolynomialSyntaxError(CfError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}" + (f" in '{text}'" if text else ""))
        self.position = position


@dataclass(frozen=True)
class QPolynomial:
    """Sparse polynomial with integer coefficients in q and x"""

    terms: Tuple[Tuple[Tuple[int, int], int], ...] = field(default=())

    @classmethod
    def from_terms(cls, terms: Terms) -> "QPolynomial":
        cleaned = {key: int(c) for key, c in terms.items() if c != 0}
        for (dq, dx) in cleaned:
            if dq < 0 or dx < 0:
                raise ValueError(f"Negative exponent in term q^{dq}*x^{dx}")
        ordered = sorted(cleaned.items(), key=lambda item: (item[0][1], item[0][0]), reverse=True)
        return cls(tuple(ordered))

    @classmethod
    def constant(cls, c: int) -> "QPolynomial":
        return cls.from_terms({(0, 0): c})

    @classmethod
    def monomial(cls, c: int, dq: int = 0, dx: int = 0) -> "QPolynomial":
        return cls.from_terms({(dq, dx): c})

    def as_dict(self) -> Terms:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_q_only(self) -> bool:
        return all(dx == 0 for (_, dx), _ in self.terms)

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        result = self.as_dict()
        for key, c in other.terms:
            result[key] = result.get(key, 0) + c
        return QPolynomial.from_terms(result)

    def __neg__(self) -> "QPolynomial":
        return QPolynomial.from_terms({key: -c for key, c in self.terms})

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other: "QPolynomial") -> "QPolynomial":
        result: Terms = {}
        for (dq1, dx1), c1 in self.terms:
            for (dq2, dx2), c2 in other.terms:
                key = (dq1 + dq2, dx1 + dx2)
                result[key] = result.get(key, 0) + c1 * c2
        return QPolynomial.from_terms(result)

    def __pow__(self, exponent: int) -> "QPolynomial":
        result = QPolynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def evaluate(self, q, x) -> Scalar:
        q = to_scalar(q)
        x = to_scalar(x)
        total = zero_like(q)
        for (dq, dx), c in self.terms:
            total = total + c * (q ** dq) * (x ** dx)
        return total

    def at_power(self, q, n: int) -> Scalar:
        """Value at x = q^n, i.e. sum c q^(dq + n dx)"""
        q = to_scalar(q)
        total = zero_like(q)
        for (dq, dx), c in self.terms:
            total = total + c * (q ** (dq + n * dx))
        return total

    def specialize(self, n: int) -> Dict[int, int]:
        """Substitute x = q^n: degree in q -> coefficient (zero coefficients dropped)"""
        result: Dict[int, int] = {}
        for (dq, dx), c in self.terms:
            d = dq + n * dx
            result[d] = result.get(d, 0) + c
        return {d: c for d, c in result.items() if c != 0}

    def degree_q_at(self, n: int) -> Optional[int]:
        spec = self.specialize(n)
        return max(spec) if spec else None

    def leading_coefficient_at(self, n: int) -> Optional[int]:
        spec = self.specialize(n)
        return spec[max(spec)] if spec else None

    def leading_monomial(self) -> Tuple[Tuple[int, int], int]:
        """Term dominating for large n: maximal deg_x, then maximal deg_q"""
        if not self.terms:
            raise ValueError("Zero polynomial has no leading monomial")
        return self.terms[0]

    def __str__(self):
        return format_polynomial(self)


def _format_monomial(dq: int, dx: int) -> str:
    parts = []
    for var, d in (("q", dq), ("x", dx)):
        if d == 1:
            parts.append(var)
        elif d > 1:
            parts.append(f"{var}^{d}")
    return "*".join(parts)


def format_polynomial(p: QPolynomial) -> str:
    if p.is_zero():
        return "0"
    pieces: List[str] = []
    for i, ((dq, dx), c) in enumerate(p.terms):
        mono = _format_monomial(dq, dx)
        magnitude = abs(c)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{magnitude}*{mono}"
        if i == 0:
            pieces.append(f"-{body}" if c < 0 else body)
        else:
            pieces.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(pieces)


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[qx])|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> Iterator[Tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"Unexpected character '{text[offset]}'", offset, text)
        kind = match.lastgroup
        start = match.start(kind)
        yield kind, match.group(kind), start
        pos = match.end()
    yield "end", "", len(text)


class _Parser:
    """Recursive-descent parser over the token stream"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.index = 0

    @property
    def current(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def _error(self, message: str) -> PolynomialSyntaxError:
        return PolynomialSyntaxError(message, self.current[2], self.text)

    def _take(self, kind: str, value: Optional[str] = None) -> str:
        tok_kind, tok_value, _ = self.current
        if tok_kind != kind or (value is not None and tok_value != value):
            expected = value or kind
            found = tok_value or "end of input"
            raise self._error(f"Expected {expected}, found '{found}'")
        self.index += 1
        return tok_value

    def _at(self, kind: str, value: Optional[str] = None) -> bool:
        tok_kind, tok_value, _ = self.current
        return tok_kind == kind and (value is None or tok_value == value)

    def parse(self) -> QPolynomial:
        if self._at("end"):
            raise self._error("Empty polynomial")
        result = self.expr()
        if not self._at("end"):
            raise self._error(f"Unexpected '{self.current[1]}'")
        return result

    def expr(self) -> QPolynomial:
        negate = False
        if self._at("op", "-"):
            self._take("op", "-")
            negate = True
        result = self.term()
        if negate:
            result = -result
        while self._at("op", "+") or self._at("op", "-"):
            op = self._take("op")
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> QPolynomial:
        result = self.factor()
        while self._at("op", "*"):
            self._take("op", "*")
            result = result * self.factor()
        return result

    def factor(self) -> QPolynomial:
        if self._at("int"):
            return QPolynomial.constant(int(self._take("int")))
        if self._at("var"):
            var = self._take("var")
            exponent = 1
            if self._at("op", "^"):
                self._take("op", "^")
                if not self._at("int"):
                    raise self._error("Exponent must be a nonnegative integer literal")
                exponent = int(self._take("int"))
            return QPolynomial.monomial(1, dq=exponent if var == "q" else 0, dx=exponent if var == "x" else 0)
        if self._at("op", "("):
            self._take("op", "(")
            inner = self.expr()
            self._take("op", ")")
            return inner
        found = self.current[1] or "end of input"
        raise self._error(f"Unexpected '{found}'")


def parse_polynomial(text: str) -> QPolynomial:
    """Parse a polynomial over Z in q and x"""
    return _Parser(str(text)).parse()
