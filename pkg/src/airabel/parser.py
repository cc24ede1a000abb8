"""Textual input for AIR equations.

A small recursive-descent parser turns ``y' = P/Q`` into exact polynomials in
``x`` and ``y`` with Gaussian-rational coefficients, then reads off the ten
coefficient slots. Grammar::

    ode    := [lhs '='] expr
    lhs    := "y'" | "dy/dx"
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := number | 'i' | 'x' | 'y' | '(' expr ')'

Juxtaposition is not multiplication: ``2x`` is a syntax error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import RationalAIR
from .errors import ParseError, ShapeError


@dataclass(frozen=True)
class GaussQ:
    """Exact complex rational ``re + im*i``."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, other):
        return GaussQ(self.re + other.re, self.im + other.im)

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return GaussQ(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    def __truediv__(self, other):
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError
        return self * GaussQ(other.re / n, -other.im / n)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


ZERO = GaussQ(Fraction(0))
ONE = GaussQ(Fraction(1))

# Polynomial: {(deg_x, deg_y): GaussQ}, zero coefficients dropped.
Poly = dict


def _padd(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for k, c in q.items():
        v = out.get(k, ZERO) + (c if sign > 0 else -c)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            v = out.get(k, ZERO) + c1 * c2
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _const(p: Poly) -> GaussQ | None:
    if not p:
        return ZERO
    if set(p) == {(0, 0)}:
        return p[(0, 0)]
    return None


@dataclass(frozen=True)
class Rat:
    """Rational function ``num / den``."""

    num: Poly
    den: Poly

    @staticmethod
    def of(c: GaussQ) -> "Rat":
        return Rat({(0, 0): c} if c else {}, {(0, 0): ONE})

    def __add__(self, o):
        if self.den == o.den:
            return Rat(_padd(self.num, o.num), self.den)
        return Rat(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)), _pmul(self.den, o.den))

    def __neg__(self):
        return Rat({k: -c for k, c in self.num.items()}, self.den)

    def __mul__(self, o):
        return Rat(_pmul(self.num, o.num), _pmul(self.den, o.den))

    def reciprocal(self):
        return Rat(self.den, self.num)

    def simplified(self) -> "Rat":
        # Only constant denominators are divided out; no polynomial gcd.
        c = _const(self.den)
        if c is not None and c and c != ONE:
            return Rat({k: v / c for k, v in self.num.items()}, {(0, 0): ONE})
        return self


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?:i(?!\w))?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()=']))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def _advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _accept(self, *values):
        if self.tok[0] in ("op", "name") and self.tok[1] in values:
            return self._advance()
        return None

    def _expect(self, value):
        if not self._accept(value):
            self._fail(f"expected {value!r}")

    def _fail(self, msg):
        kind, value, pos = self.tok
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"{msg}, found {found}", pos)

    def ode(self) -> Rat:
        self._lhs()
        e = self.expr()
        if self.tok[0] != "end":
            self._fail("unexpected token")
        return e

    def _lhs(self):
        if "=" not in [v for k, v, _ in self.tokens if k == "op"]:
            return
        start = self.i
        if self._accept("y") and self._accept("'"):
            self._expect("=")
            return
        self.i = start
        if self._accept("dy") and self._accept("/") and self._accept("dx"):
            self._expect("=")
            return
        self.i = start
        self._fail("expected \"y' =\" or \"dy/dx =\"")

    def expr(self) -> Rat:
        e = self.term()
        while True:
            if self._accept("+"):
                e = e + self.term()
            elif self._accept("-"):
                e = e + (-self.term())
            else:
                return e

    def term(self) -> Rat:
        e = self.unary()
        while True:
            if self._accept("*"):
                e = (e * self.unary()).simplified()
            elif self.tok[1] == "/":
                pos = self._advance()[2]
                rhs = self.unary()
                if not rhs.num:
                    raise ParseError("division by zero", pos)
                e = (e * rhs.reciprocal()).simplified()
            else:
                return e

    def unary(self) -> Rat:
        if self._accept("-"):
            return -self.unary()
        if self._accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Rat:
        base = self.atom()
        if self._accept("^", "**"):
            pos = self.tok[2]
            exp = self.unary()
            c = _const(exp.num) if _const(exp.den) == ONE else None
            if c is None or c.im != 0 or c.re.denominator != 1:
                raise ParseError("exponent must be an integer constant", pos)
            n = int(c.re)
            if n < 0:
                if not base.num:
                    raise ParseError("zero raised to a negative power", pos)
                base, n = base.reciprocal(), -n
            out = Rat.of(ONE)
            for _ in range(n):
                out = (out * base).simplified()
            return out
        return base

    def atom(self) -> Rat:
        kind, value, pos = self.tok
        if kind == "num":
            self._advance()
            if value.endswith("i"):  # imaginary literal such as 2i or 0.5e-3i
                return Rat.of(GaussQ(Fraction(0), Fraction(value[:-1])))
            return Rat.of(GaussQ(Fraction(value)))
        if kind == "name":
            self._advance()
            if value == "x":
                return Rat({(1, 0): ONE}, {(0, 0): ONE})
            if value == "y":
                return Rat({(0, 1): ONE}, {(0, 0): ONE})
            if value == "i":
                return Rat.of(GaussQ(Fraction(0), Fraction(1)))
            raise ParseError(f"unknown identifier {value!r}", pos)
        if self._accept("("):
            e = self.expr()
            self._expect(")")
            return e
        self._fail("expected a number, x, y, i or '('")


def _degree(p: Poly, axis: int) -> int:
    return max((k[axis] for k in p), default=-1)


def parse_ode(text: str) -> RationalAIR:
    """Parse ``y' = P(y)/((s0+s1 x+s2 x^2) y + r0+r1 x+r2 x^2)``.

    Raises :class:`ParseError` for malformed text and :class:`ShapeError`
    when the expanded expression does not have the AIR shape.
    """
    rat = _Parser(text).ode().simplified()
    num, den = rat.num, rat.den
    if not num:
        raise ShapeError("right-hand side is identically zero")
    if _degree(num, 0) > 0:
        raise ShapeError("numerator depends on x")
    if _degree(num, 1) > 3:
        raise ShapeError("numerator degree in y exceeds 3")
    if _degree(den, 1) > 1:
        raise ShapeError("denominator not linear in y")
    if _degree(den, 0) > 2:
        raise ShapeError("denominator coefficients not quadratic in x")
    a = [complex(num.get((0, j), ZERO)) for j in range(4)]
    s = [complex(den.get((i, 1), ZERO)) for i in range(3)]
    r = [complex(den.get((i, 0), ZERO)) for i in range(3)]
    if not any(s) and not any(r):
        raise ShapeError("denominator is identically zero")
    return RationalAIR(tuple(a), tuple(s), tuple(r))


def _num(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"({c.real!r})"
    if c.real == 0:
        return f"({c.imag!r}*i)"
    return f"({c.real!r}+{c.imag!r}*i)"


def _poly(terms) -> str:
    parts = [f"{_num(c)}{mono}" for c, mono in terms if c != 0]
    return " + ".join(parts) if parts else "0"


def render(eq: RationalAIR) -> str:
    """Text form accepted by :func:`parse_ode`; decimal coefficients round-trip exactly."""
    ys = ("", "*y", "*y^2", "*y^3")
    xs = ("", "*x", "*x^2")
    num = _poly(zip(eq.a, ys))
    den = _poly([(c, m + "*y") for c, m in zip(eq.s, xs)] + list(zip(eq.r, xs)))
    return f"y' = ({num})/({den})"
