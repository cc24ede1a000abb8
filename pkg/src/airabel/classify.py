"""Reduction of rational AIR equations to the six canonical classes.

The pipeline has three stages:

1. ``normalize_numerator``: a Mobius map of y moves the roots of the
   numerator cubic so that the numerator becomes 1, y or y(y-1).
2. ``reduce_x``: Mobius maps of x bring the denominator to
   ``A(x) y + (x - b)(x - c)`` with ``A`` constant or proportional to x.
3. ``reduce_to_class``: shifts and scalings remove the remaining redundant
   parameters.

Which class an equation lands in is decided by Mobius invariants: the
multiplicity pattern of the numerator roots (as points of the projective
line) and whether the denominator's y-coefficient at the root sent to
infinity is a perfect square as a binary quadratic form.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import (
    ZERO_TOL,
    Mobius,
    RationalAIR,
    StepKind,
    TransformChain,
    TransformStep,
    principal_root,
)
from .errors import ClassificationError, InvalidArgumentError

CLUSTER_TOL = 1e-7
CHECK_TOL = 1e-8

Root = Optional[complex]  # None is the point at infinity


class Pattern(str, Enum):
    THREE_DISTINCT = "ThreeDistinct"
    TWO_DISTINCT = "TwoDistinct"
    ONE_TRIPLE = "OneTriple"


@dataclass(frozen=True)
class RootStructure:
    """Roots of the numerator cubic as points of the projective line.

    ``roots`` lists finite roots with repetition; ``infinite`` is the
    multiplicity of the root at infinity (the degree drop).
    """

    roots: tuple[complex, ...]
    infinite: int
    pattern: Pattern

    def distinct(self) -> list[tuple[Root, int]]:
        out: list[tuple[Root, int]] = []
        for z in self.roots:
            for i, (w, m) in enumerate(out):
                if w == z:
                    out[i] = (w, m + 1)
                    break
            else:
                out.append((z, 1))
        if self.infinite:
            out.append((None, self.infinite))
        return out


def _key(z: Root):
    if z is None:
        return (float("inf"), 0.0, 0.0)
    return (abs(z), z.real, z.imag)


def _matches(coeffs: np.ndarray, rebuilt: np.ndarray, tol: float) -> bool:
    scale = float(np.max(np.abs(coeffs)))
    return float(np.max(np.abs(coeffs - rebuilt))) <= tol * scale


def _from_roots(lead: complex, roots: Sequence[complex]) -> np.ndarray:
    out = np.array([lead], dtype=complex)
    for z in roots:
        out = np.convolve(out, np.array([1.0, -z], dtype=complex))
    return out[::-1]  # ascending


def _polish(c: np.ndarray, z: complex, steps: int = 3) -> complex:
    """A few Newton steps on the ascending polynomial ``c``."""
    p = np.polynomial.Polynomial(c)
    dp = p.deriv()
    for _ in range(steps):
        d = dp(z)
        if d == 0:
            break
        step = p(z) / d
        if not np.isfinite(step):
            break
        z = z - step
    return complex(z)


def _finite_roots(c: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Roots with multiplicity of the ascending polynomial ``c`` (degree <= 3).

    Multiple roots are detected algebraically: a candidate factorisation is
    rebuilt and compared to ``c`` at relative tolerance ``tol``. This is far
    more robust than clustering eigenvalues, which split a triple root by
    roughly the cube root of machine epsilon.
    """
    d = len(c) - 1
    if d == 0:
        return []
    if d == 1:
        return [(-c[0] / c[1], 1)]
    lead = c[-1]
    if d == 2:
        rho = -c[1] / (2 * lead)
        if _matches(c, _from_roots(lead, [rho, rho]), tol):
            return [(complex(rho), 2)]
        disc = cmath.sqrt(c[1] * c[1] - 4 * lead * c[0])
        q = -0.5 * (c[1] + disc if (c[1].conjugate() * disc).real >= 0 else c[1] - disc)
        r1 = q / lead
        r2 = c[0] / q if q != 0 else -c[1] / lead - r1
        return [(complex(r1), 1), (complex(r2), 1)]
    mu = -c[2] / (3 * lead)
    if _matches(c, _from_roots(lead, [mu, mu, mu]), tol):
        return [(complex(mu), 3)]
    dc = np.array([c[1], 2 * c[2], 3 * c[3]], dtype=complex)
    for rho, _ in _finite_roots(dc, tol):
        sigma = -c[2] / lead - 2 * rho
        if _matches(c, _from_roots(lead, [rho, rho, sigma]), tol):
            return [(complex(rho), 2), (complex(sigma), 1)]
    roots = [_polish(c, z) for z in np.roots(c[::-1])]
    # final safety net: merge roots closer than the clustering threshold
    big = max(abs(z) for z in roots)
    merged: list[list] = []
    for z in roots:
        for group in merged:
            if abs(group[0] - z) <= CLUSTER_TOL * (1 + big):
                group.append(z)
                break
        else:
            merged.append([z])
    return [(complex(sum(g) / len(g)), len(g)) for g in merged]


def projective_roots(coeffs: Sequence[complex], degree: int, tol: float = ZERO_TOL):
    """Roots of a binary form of the given degree, as ``[(root|None, mult)]``."""
    c = np.array(coeffs, dtype=complex)
    scale = float(np.max(np.abs(c)))
    if scale == 0:
        raise InvalidArgumentError("all coefficients are zero")
    eff = degree
    while eff > 0 and abs(c[eff]) <= tol * scale:
        eff -= 1
    out: list[tuple[Root, int]] = list(_finite_roots(c[: eff + 1], tol))
    if eff < degree:
        out.append((None, degree - eff))
    return out


def cubic_roots(a0, a1, a2, a3) -> RootStructure:
    found = projective_roots([a0, a1, a2, a3], 3)
    finite = []
    infinite = 0
    for z, m in found:
        if z is None:
            infinite = m
        else:
            finite.extend([z] * m)
    count = len(found)
    pattern = {3: Pattern.THREE_DISTINCT, 2: Pattern.TWO_DISTINCT, 1: Pattern.ONE_TRIPLE}[count]
    return RootStructure(tuple(finite), infinite, pattern)


def _is_square(q: Sequence[complex]) -> bool:
    return len(projective_roots(q, 2)) == 1


def _eval_form(q: Sequence[complex], z: Root) -> tuple[complex, float]:
    """Value of a binary quadratic at ``z`` together with a magnitude scale."""
    if z is None:
        return q[2], float(max(abs(v) for v in q))
    return q[0] + q[1] * z + q[2] * z * z, abs(q[0]) + abs(q[1] * z) + abs(q[2] * z * z)


def _form_at_root(eq: RationalAIR, rho: Root) -> np.ndarray:
    """The x-quadratic ``D(x, rho)`` (or the y-coefficient when rho is infinite)."""
    s = np.array(eq.s, dtype=complex)
    if rho is None:
        return s
    return s * rho + np.array(eq.r, dtype=complex)


# ---------------------------------------------------------------- canonical classes


class ClassTag(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"
    DEGENERATE_LINEAR = "DegenerateLinear"


PARAM_NAMES = {
    ClassTag.C1: ("a", "b", "c"),
    ClassTag.C2: ("a", "c"),
    ClassTag.C3: ("alpha", "beta"),
    ClassTag.C4: ("c",),
    ClassTag.C5: ("b",),
    ClassTag.C6: (),
    ClassTag.DEGENERATE_LINEAR: (),
}

Y_Y1 = (0, -1, 1, 0)
Y_ONLY = (0, 1, 0, 0)
ONE = (1, 0, 0, 0)


@dataclass(frozen=True)
class CanonicalClass:
    tag: ClassTag
    params: tuple[complex, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "tag", ClassTag(self.tag))
        params = tuple(complex(p) for p in self.params)
        if len(params) != len(PARAM_NAMES[self.tag]):
            raise InvalidArgumentError(
                f"{self.tag.value} takes parameters {PARAM_NAMES[self.tag]}, got {len(params)}"
            )
        if not all(np.isfinite(p) for p in params):
            raise InvalidArgumentError("class parameters must be finite")
        object.__setattr__(self, "params", params)

    @property
    def named(self) -> dict[str, complex]:
        return dict(zip(PARAM_NAMES[self.tag], self.params))

    def with_params(self, *params) -> "CanonicalClass":
        return CanonicalClass(self.tag, params)

    def equation(self) -> RationalAIR:
        """The representative equation of this class member."""
        t, p = self.tag, self.params
        if t is ClassTag.C1:
            a, b, c = p
            return RationalAIR(Y_Y1, (0, a, 0), (b * c, -(b + c), 1))
        if t is ClassTag.C2:
            a, c = p
            return RationalAIR(Y_Y1, (a, 0, 0), (0, -c, 1))
        if t is ClassTag.C3:
            al, be = p
            return RationalAIR(Y_ONLY, (0, 1, 0), (al * be, -(al + be), 1))
        if t is ClassTag.C4:
            (c,) = p
            return RationalAIR(Y_ONLY, (1, 0, 0), (0, -c, 1))
        if t is ClassTag.C5:
            (b,) = p
            return RationalAIR(ONE, (0, 1, 0), (b, 0, 1))
        if t is ClassTag.C6:
            return RationalAIR(ONE, (1, 0, 0), (0, 0, 1))
        raise InvalidArgumentError("DegenerateLinear has no representative equation")

    def __str__(self):
        if not self.params:
            return self.tag.value
        inner = ", ".join(f"{k}={v.real:.6g}" if v.imag == 0 else f"{k}={v:.6g}" for k, v in self.named.items())
        return f"{self.tag.value}{{{inner}}}"


# ---------------------------------------------------------------- helpers


def _step(m: Mobius, on_x: bool) -> TransformStep:
    """Wrap ``m`` in the most specific step kind."""
    if m.s == 0 and m.r != 0:
        p, q = m.p / m.r, m.q / m.r
        if p == 0:
            return TransformStep(StepKind.SCALE_X if on_x else StepKind.SCALE_Y, q)
        if q == 1:
            return TransformStep(StepKind.SHIFT_X if on_x else StepKind.SHIFT_Y, p)
    return TransformStep(StepKind.MOBIUS_X if on_x else StepKind.MOBIUS_Y, m)


def _snap(eq: RationalAIR, numerator: Sequence[complex], zero_s=(), zero_r=()) -> RationalAIR:
    """Rescale so the numerator is exactly ``numerator``; zero known-vanishing slots.

    Raises :class:`ClassificationError` when the equation is not close to
    the claimed shape, so an arithmetic slip never goes unnoticed.
    """
    target = np.array(numerator, dtype=complex)
    a = np.array(eq.a, dtype=complex)
    lam = np.vdot(target, a) / np.vdot(target, target)
    if lam == 0 or np.max(np.abs(a - lam * target)) > CHECK_TOL * np.max(np.abs(a)):
        raise ClassificationError(f"numerator is not proportional to {numerator}")
    s = np.array(eq.s, dtype=complex) / lam
    r = np.array(eq.r, dtype=complex) / lam
    scale = max(float(np.max(np.abs(s))), float(np.max(np.abs(r))))
    for k in zero_s:
        if abs(s[k]) > CHECK_TOL * max(scale, 1.0):
            raise ClassificationError(f"expected vanishing x^{k} coefficient of the y-part")
        s[k] = 0
    for k in zero_r:
        if abs(r[k]) > CHECK_TOL * max(scale, 1.0):
            raise ClassificationError(f"expected vanishing x^{k} coefficient of the constant part")
        r[k] = 0
    return RationalAIR(tuple(target), tuple(s), tuple(r))


def _three_point_map(z0: Root, z1: Root, zinf: Root) -> Mobius:
    """The Mobius map with m(0) = z0, m(1) = z1, m(inf) = zinf."""
    if zinf is None:
        return Mobius(z0, z1 - z0, 1, 0)
    if z0 is None:
        return Mobius(z1 - zinf, zinf, 0, 1)
    if z1 is None:
        return Mobius(z0, -zinf, 1, -1)
    return Mobius(z0 * (z1 - zinf), zinf * (z0 - z1), z1 - zinf, z0 - z1)


def _two_point_map(z0: Root, zinf: Root) -> Mobius:
    """A Mobius map with m(0) = z0 and m(inf) = zinf."""
    if zinf is None:
        return Mobius(z0, 1, 1, 0)
    if z0 is None:
        return Mobius(1, zinf, 0, 1)
    return Mobius(z0, zinf, 1, 1)


def _apply(eq: RationalAIR, chain: TransformChain, m: Mobius, on_x: bool):
    if m.is_identity():
        return eq, chain
    step = _step(m, on_x)
    return step.apply(eq), chain.then(step)


# ---------------------------------------------------------------- pipeline


class _Normalized(NamedTuple):
    eq: RationalAIR
    chain: TransformChain
    pattern: Pattern


def _normalize(eq: RationalAIR) -> _Normalized:
    structure = cubic_roots(*eq.a)
    roots = sorted(structure.distinct(), key=lambda zm: _key(zm[0]))
    eq_scale = eq.scale()
    for z, _ in roots:
        q = _form_at_root(eq, z)
        if np.max(np.abs(q)) <= ZERO_TOL * eq_scale * (1 + (0 if z is None else abs(z))):
            raise ClassificationError(
                "denominator does not depend on y after normalisation (separable equation)"
            )
    pattern = structure.pattern
    if pattern is Pattern.THREE_DISTINCT:
        pts = [z for z, _ in roots]
        square = [z for z in pts if _is_square(_form_at_root(eq, z))]
        at_inf = square[-1] if square else pts[-1]
        rest = [z for z in pts if z is not at_inf]
        m = _three_point_map(rest[0], rest[1], at_inf)
        target = Y_Y1
    elif pattern is Pattern.TWO_DISTINCT:
        double = next(z for z, k in roots if k == 2)
        single = next(z for z, k in roots if k == 1)
        m = _two_point_map(single, double)
        target = Y_ONLY
    else:
        (z, _), = roots
        m = Mobius.identity() if z is None else Mobius(1, z, 0, 1)
        target = ONE
    out, chain = _apply(eq, TransformChain(), m, on_x=False)
    return _Normalized(_snap(out, target), chain, pattern)


def normalize_numerator(eq: RationalAIR) -> tuple[RationalAIR, TransformChain]:
    """Mobius-in-y map making the numerator exactly 1, y or y(y-1)."""
    out = _normalize(eq)
    return out.eq, out.chain


class ReducedX(NamedTuple):
    eq: RationalAIR
    chain: TransformChain
    degenerate: bool


def _pick_kappa(roots: list[Root]) -> Root:
    finite = [z for z in roots if z is not None]
    if not finite:
        return None
    return max(finite, key=lambda z: (abs(z), z.real, z.imag))


def reduce_x(eq: RationalAIR) -> ReducedX:
    """Bring a normalised equation to ``P(y) / (A y + (x - b)(x - c))``.

    ``A`` ends up either constant or a multiple of x. ``degenerate`` is set
    when the x^2 coefficient of the constant part vanishes at the scaling
    step, or when S and R share a root (a Mobius map could then make it
    vanish); either way the swapped equation is first-order linear.
    """
    target = eq.a
    chain = TransformChain()
    s = np.array(eq.s, dtype=complex)
    r = np.array(eq.r, dtype=complex)

    s_roots = [z for z, k in projective_roots(s, 2) for _ in range(k)]
    # A root shared by S and R can be sent to infinity, which kills b2; the
    # equation is then linear after the swap whatever the later steps give.
    shared = False
    for z in dict.fromkeys(s_roots):
        val, scale = _eval_form(r, z)
        if abs(val) <= ZERO_TOL * max(scale, ZERO_TOL):
            shared = True

    if None not in s_roots:
        kappa = _pick_kappa(s_roots)
        eq, chain = _apply(eq, chain, Mobius(1, kappa, 0, 1), on_x=True)
    eq = _snap(eq, target, zero_s=(2,))

    c0, c1 = eq.s[0], eq.s[1]
    s_scale = max(abs(c0), abs(c1))
    if abs(c1) > ZERO_TOL * s_scale and abs(c0) > ZERO_TOL * s_scale:
        eq, chain = _apply(eq, chain, Mobius.shift(-c0 / c1), on_x=True)
        eq = _snap(eq, target, zero_s=(0, 2))
    elif abs(c1) <= ZERO_TOL * s_scale:
        eq = _snap(eq, target, zero_s=(1, 2))
    else:
        eq = _snap(eq, target, zero_s=(0, 2))

    b2 = eq.r[2]
    if abs(b2) <= ZERO_TOL * max(abs(v) for v in eq.r):
        return ReducedX(_snap(eq, target, zero_r=(2,)), chain, True)
    eq, chain = _apply(eq, chain, Mobius.scaling(1 / b2), on_x=True)
    zero_s = (1, 2) if eq.s[1] == 0 else (0, 2)
    eq = _snap(eq, target, zero_s=zero_s)
    r = list(eq.r)
    r[2] = 1
    eq = RationalAIR(eq.a, eq.s, tuple(r))
    return ReducedX(eq, chain, shared)


def _split_quadratic(r: Sequence[complex]) -> tuple[complex, complex]:
    """Roots (b, c) of x^2 + r1 x + r0, ordered by real then imaginary part."""
    disc = cmath.sqrt(r[1] * r[1] - 4 * r[0])
    b, c = (-r[1] - disc) / 2, (-r[1] + disc) / 2
    # recompute the smaller one from the product for accuracy
    if abs(b) < abs(c) and c != 0:
        b = r[0] / c
    elif abs(c) < abs(b) and b != 0:
        c = r[0] / b
    b, c = sorted((complex(b), complex(c)), key=lambda z: (z.real, z.imag))
    return b, c


def reduce_to_class(eq: RationalAIR, pattern: Pattern) -> tuple[CanonicalClass, TransformChain]:
    """Remove the redundant parameters of ``P(y) / (A y + (x-b)(x-c))``."""
    chain = TransformChain()
    s0, s1 = eq.s[0], eq.s[1]
    case_b = s1 != 0
    a = s1 if case_b else s0
    b, c = _split_quadratic(eq.r)
    pattern = Pattern(pattern)

    if pattern is Pattern.THREE_DISTINCT:
        if case_b:
            cls = CanonicalClass(ClassTag.C1, (a, b, c))
        else:
            eq, chain = _apply(eq, chain, Mobius.shift(b), on_x=True)
            cls = CanonicalClass(ClassTag.C2, (a, c - b))
        return _checked(eq, chain, cls)

    if a == 0:
        raise ClassificationError("y-coefficient of the denominator vanishes (separable equation)")

    if pattern is Pattern.TWO_DISTINCT:
        eq, chain = _apply(eq, chain, Mobius.scaling(1 / a), on_x=False)
        if case_b:
            cls = CanonicalClass(ClassTag.C3, (b, c))
        else:
            eq, chain = _apply(eq, chain, Mobius.shift(b), on_x=True)
            cls = CanonicalClass(ClassTag.C4, (c - b,))
        return _checked(eq, chain, cls)

    if case_b:
        eq, chain = _apply(eq, chain, Mobius((b + c) / a, 1 / a, 1, 0), on_x=False)
        h = cmath.sqrt(a)
        eq, chain = _apply(eq, chain, Mobius.scaling(h), on_x=True)
        eq, chain = _apply(eq, chain, Mobius.scaling(h), on_x=False)
        return _checked(eq, chain, CanonicalClass(ClassTag.C5, (b * c / a,)))

    if abs(b + c) > ZERO_TOL * (1 + abs(b) + abs(c)):
        sigma = -(b + c)
        eq, chain = _apply(eq, chain, Mobius.scaling(sigma), on_x=True)
        eq, chain = _apply(eq, chain, Mobius(-b * c / a, 1 / sigma, 1, 0), on_x=False)
        a1 = a / sigma**3
        t = principal_root(a1, 3)
        eq, chain = _apply(eq, chain, Mobius(-0.5, t, 1, 0), on_x=True)
        eq, chain = _apply(eq, chain, Mobius(1 / (4 * a1), 1 / t, 1, 0), on_x=False)
    else:
        h = cmath.sqrt(a)
        eq, chain = _apply(eq, chain, Mobius.scaling(h), on_x=True)
        eq, chain = _apply(eq, chain, Mobius(-b * c / a, 1 / h, 1, 0), on_x=False)
        t = principal_root(1 / h, 3)
        eq, chain = _apply(eq, chain, Mobius.scaling(t), on_x=True)
        eq, chain = _apply(eq, chain, Mobius.scaling(1 / t), on_x=False)
    return _checked(eq, chain, CanonicalClass(ClassTag.C6))


def _checked(eq, chain, cls: CanonicalClass):
    rep = cls.equation()
    if not eq.is_close(rep, CHECK_TOL):
        raise ClassificationError(f"reduction did not reach the {cls.tag.value} representative")
    return cls, chain


def classify(eq: RationalAIR) -> tuple[CanonicalClass, TransformChain]:
    """Canonical class of ``eq`` and the chain taking ``eq`` to its representative."""
    eq = eq.normalized()
    norm = _normalize(eq)
    red = reduce_x(norm.eq)
    chain = norm.chain.extend(red.chain)
    if red.degenerate:
        return CanonicalClass(ClassTag.DEGENERATE_LINEAR), chain
    cls, tail = reduce_to_class(red.eq, norm.pattern)
    return cls, chain.extend(tail)
