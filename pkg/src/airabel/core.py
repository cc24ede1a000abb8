"""Rational AIR equations, Mobius maps and transformation chains.

An AIR equation is stored as ten complex coefficients

    y' = (a3 y^3 + a2 y^2 + a1 y + a0) / ((s0 + s1 x + s2 x^2) y + r0 + r1 x + r2 x^2)

and every transformation is a *substitution*: a step carrying the map ``m``
on ``x`` replaces the old variable by ``m`` of the new one, ``x_old = m(x_new)``.
A chain of steps is applied left to right.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidArgumentError, PoleError

ZERO_TOL = 1e-10
DEGENERACY_TOL = 1e-12


def _as_complex(value, name="value") -> complex:
    try:
        z = complex(value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} is not a number: {value!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidArgumentError(f"{name} is not finite: {value!r}")
    return z


def _padded(coeffs, n) -> tuple[complex, ...]:
    out = [complex(c) for c in coeffs[:n]]
    out += [0j] * (n - len(out))
    return tuple(out)


@dataclass(frozen=True)
class RationalAIR:
    """The ten coefficients of a rational AIR equation (all complex)."""

    a: tuple[complex, complex, complex, complex]
    s: tuple[complex, complex, complex]
    r: tuple[complex, complex, complex]

    def __post_init__(self):
        if len(self.a) != 4 or len(self.s) != 3 or len(self.r) != 3:
            raise InvalidArgumentError("expected 4 numerator and 3+3 denominator coefficients")
        a = tuple(_as_complex(c, "numerator coefficient") for c in self.a)
        s = tuple(_as_complex(c, "denominator coefficient") for c in self.s)
        r = tuple(_as_complex(c, "denominator coefficient") for c in self.r)
        if not any(a):
            raise InvalidArgumentError("numerator cubic is identically zero")
        if not any(s) and not any(r):
            raise InvalidArgumentError("denominator is identically zero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_vector(cls, v: Sequence[complex]) -> "RationalAIR":
        v = list(v)
        return cls(tuple(v[0:4]), tuple(v[4:7]), tuple(v[7:10]))

    @classmethod
    def from_polys(cls, num, den_y, den_c) -> "RationalAIR":
        """Build from ascending coefficient sequences (shorter ones are zero-padded)."""
        return cls(_padded(list(num), 4), _padded(list(den_y), 3), _padded(list(den_c), 3))

    def vector(self) -> np.ndarray:
        return np.array(self.a + self.s + self.r, dtype=complex)

    def scale(self) -> float:
        return float(np.max(np.abs(self.vector())))

    def normalized(self) -> "RationalAIR":
        """Same equation with the largest coefficient of magnitude one."""
        return RationalAIR.from_vector(self.vector() / self.scale())

    def numerator(self, y):
        a0, a1, a2, a3 = self.a
        return ((a3 * y + a2) * y + a1) * y + a0

    def denominator(self, x, y):
        s0, s1, s2 = self.s
        r0, r1, r2 = self.r
        return (s0 + s1 * x + s2 * x * x) * y + r0 + r1 * x + r2 * x * x

    def rhs(self, x, y):
        return self.numerator(y) / self.denominator(x, y)

    def is_close(self, other: "RationalAIR", tol: float = 1e-8) -> bool:
        return equation_distance(self, other) <= tol

    def __str__(self):
        def poly(cs, var):
            terms = []
            for k, c in enumerate(cs):
                if c == 0:
                    continue
                mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
                terms.append(_fmt(c) + (f"*{mono}" if mono else ""))
            return " + ".join(terms) or "0"

        return (
            f"y' = ({poly(self.a, 'y')}) / "
            f"(({poly(self.s, 'x')})*y + {poly(self.r, 'x')})"
        )


def _fmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return f"({c.real!r}{c.imag:+.17g}*i)"


def equation_distance(e1: RationalAIR, e2: RationalAIR) -> float:
    """Projective distance between two equations.

    Both coefficient vectors are divided by their entry at the position where
    ``e2`` is largest; the result is the max-norm difference.
    """
    v1, v2 = e1.vector(), e2.vector()
    k = int(np.argmax(np.abs(v2)))
    if v1[k] == 0:
        return math.inf
    return float(np.max(np.abs(v1 / v1[k] - v2 / v2[k])))


def is_zero(value: complex, scale: float, tol: float = ZERO_TOL) -> bool:
    return abs(value) <= tol * scale


@dataclass(frozen=True)
class Mobius:
    """The linear-fractional map ``v -> (p + q v) / (r + s v)``."""

    p: complex
    q: complex
    r: complex
    s: complex

    def __post_init__(self):
        for name in "pqrs":
            object.__setattr__(self, name, _as_complex(getattr(self, name), name))
        big = max(abs(self.p), abs(self.q), abs(self.r), abs(self.s))
        if big == 0 or abs(self.det) <= DEGENERACY_TOL * big * big:
            raise InvalidArgumentError(f"degenerate Mobius map {self}")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(0, 1, 1, 0)

    @classmethod
    def shift(cls, b) -> "Mobius":
        return cls(b, 1, 1, 0)

    @classmethod
    def scaling(cls, k) -> "Mobius":
        return cls(0, k, 1, 0)

    @property
    def det(self) -> complex:
        # derivative numerator: d/dv m(v) = det / (r + s v)^2
        return self.q * self.r - self.p * self.s

    def __call__(self, v):
        """Evaluate; ``None`` stands for the point at infinity on both sides."""
        if v is None:
            return None if self.s == 0 else self.q / self.s
        den = self.r + self.s * v
        if den == 0:
            return None
        return (self.p + self.q * v) / den

    def inverse(self) -> "Mobius":
        return Mobius(-self.p, self.r, self.q, -self.s)

    def compose(self, inner: "Mobius") -> "Mobius":
        """``self o inner``: first ``inner`` then ``self``."""
        p1, q1, r1, s1 = self.p, self.q, self.r, self.s
        p2, q2, r2, s2 = inner.p, inner.q, inner.r, inner.s
        return Mobius(
            p=q1 * p2 + p1 * r2,
            q=q1 * q2 + p1 * s2,
            r=s1 * p2 + r1 * r2,
            s=s1 * q2 + r1 * s2,
        )

    def is_identity(self, tol: float = 1e-14) -> bool:
        if abs(self.r) == 0:
            return False
        p, q, s = self.p / self.r, self.q / self.r, self.s / self.r
        return abs(p) <= tol and abs(q - 1) <= tol and abs(s) <= tol


def _substitute(coeffs: Sequence[complex], m: Mobius, degree: int) -> np.ndarray:
    """Ascending coefficients of ``(r + s v)^degree * C(m(v))``."""
    num = np.array([m.p, m.q], dtype=complex)
    den = np.array([m.r, m.s], dtype=complex)
    out = np.zeros(degree + 1, dtype=complex)
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        term = npoly.polymul(npoly.polypow(num, k), npoly.polypow(den, degree - k))
        term = np.asarray(term, dtype=complex)
        out[: len(term)] += c * term
    return out


def apply_mobius_y(eq: RationalAIR, m: Mobius) -> RationalAIR:
    """Substitute ``y = m(Y)`` and return the equation satisfied by ``Y``."""
    num = _substitute(eq.a, m, 3)
    s = np.array(eq.s, dtype=complex)
    r = np.array(eq.r, dtype=complex)
    new_s = m.det * (m.q * s + m.s * r)
    new_r = m.det * (m.p * s + m.r * r)
    return RationalAIR.from_vector(np.concatenate([num, new_s, new_r])).normalized()


def apply_mobius_x(eq: RationalAIR, m: Mobius) -> RationalAIR:
    """Substitute ``x = m(X)`` and return the equation in the new variable."""
    num = m.det * np.array(eq.a, dtype=complex)
    new_s = _substitute(eq.s, m, 2)
    new_r = _substitute(eq.r, m, 2)
    return RationalAIR.from_vector(np.concatenate([num, new_s, new_r])).normalized()


class StepKind(str, Enum):
    MOBIUS_X = "MobiusOnX"
    MOBIUS_Y = "MobiusOnY"
    SCALE_X = "ScaleX"
    SCALE_Y = "ScaleY"
    SHIFT_X = "ShiftX"
    SHIFT_Y = "ShiftY"


_ON_X = {StepKind.MOBIUS_X, StepKind.SCALE_X, StepKind.SHIFT_X}


@dataclass(frozen=True)
class TransformStep:
    """One substitution ``old = m(new)`` on x or on y.

    ``value`` is a :class:`Mobius` for the Mobius kinds, otherwise the scale
    factor ``k`` (``old = k new``) or the shift ``b`` (``old = new + b``).
    """

    kind: StepKind
    value: object

    def __post_init__(self):
        object.__setattr__(self, "kind", StepKind(self.kind))
        if self.kind in (StepKind.MOBIUS_X, StepKind.MOBIUS_Y):
            if not isinstance(self.value, Mobius):
                raise InvalidArgumentError("Mobius step needs a Mobius payload")
        else:
            v = _as_complex(self.value, "step parameter")
            if self.kind in (StepKind.SCALE_X, StepKind.SCALE_Y) and v == 0:
                raise InvalidArgumentError("scaling by zero is not invertible")
            object.__setattr__(self, "value", v)

    @property
    def on_x(self) -> bool:
        return self.kind in _ON_X

    def mobius(self) -> Mobius:
        if isinstance(self.value, Mobius):
            return self.value
        if self.kind in (StepKind.SCALE_X, StepKind.SCALE_Y):
            return Mobius.scaling(self.value)
        return Mobius.shift(self.value)

    def inverse(self) -> "TransformStep":
        if isinstance(self.value, Mobius):
            return TransformStep(self.kind, self.value.inverse())
        if self.kind in (StepKind.SCALE_X, StepKind.SCALE_Y):
            return TransformStep(self.kind, 1 / self.value)
        return TransformStep(self.kind, -self.value)

    def apply(self, eq: RationalAIR) -> RationalAIR:
        if self.on_x:
            return apply_mobius_x(eq, self.mobius())
        return apply_mobius_y(eq, self.mobius())

    def map_point(self, x, y):
        """Old coordinates to new ones; raises :class:`PoleError` at infinity."""
        inv = self.mobius().inverse()
        if self.on_x:
            x = inv(x)
        else:
            y = inv(y)
        if x is None or y is None:
            raise PoleError(f"{self.describe()} sends the point to infinity")
        return x, y

    def is_close(self, other: "TransformStep", tol: float = 1e-12) -> bool:
        if self.kind != other.kind:
            return False
        a, b = self.mobius(), other.mobius()
        va = np.array([a.p, a.q, a.r, a.s])
        vb = np.array([b.p, b.q, b.r, b.s])
        k = int(np.argmax(np.abs(va)))
        if vb[k] == 0:
            return False
        return float(np.max(np.abs(va / va[k] - vb / vb[k]))) <= tol

    def describe(self) -> str:
        var = "x" if self.on_x else "y"
        if isinstance(self.value, Mobius):
            m = self.value
            return f"{var} -> ({_fmt(m.p)} + {_fmt(m.q)}*{var}) / ({_fmt(m.r)} + {_fmt(m.s)}*{var})"
        if self.kind in (StepKind.SCALE_X, StepKind.SCALE_Y):
            return f"{var} -> {_fmt(self.value)}*{var}"
        return f"{var} -> {var} + {_fmt(self.value)}"


@dataclass(frozen=True)
class TransformChain:
    steps: tuple[TransformStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __iter__(self) -> Iterator[TransformStep]:
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def then(self, *steps: TransformStep) -> "TransformChain":
        return TransformChain(self.steps + tuple(steps))

    def extend(self, other: Iterable[TransformStep]) -> "TransformChain":
        return TransformChain(self.steps + tuple(other))

    def apply(self, eq: RationalAIR) -> RationalAIR:
        for step in self.steps:
            eq = step.apply(eq)
        return eq

    def map_point(self, x, y):
        for step in self.steps:
            x, y = step.map_point(x, y)
        return x, y

    def inverse(self) -> "TransformChain":
        return chain_invert(self)

    def describe(self) -> list[str]:
        return [step.describe() for step in self.steps]


def chain_invert(chain: TransformChain) -> TransformChain:
    return TransformChain(tuple(step.inverse() for step in reversed(chain.steps)))


def principal_root(z: complex, n: int) -> complex:
    """Principal n-th root, argument in (-pi/n, pi/n]."""
    z = complex(z)
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / n)
