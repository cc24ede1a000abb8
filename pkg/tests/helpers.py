"""Random generators and independent oracles shared by the test modules."""

from __future__ import annotations

import numpy as np

from airabel import Mobius, RationalAIR
from airabel.classify import CanonicalClass, ClassTag


def crand(rng, lo=-1.0, hi=1.0):
    return complex(rng.uniform(lo, hi), rng.uniform(lo, hi))


def random_mobius(rng, lo=-2.0, hi=2.0) -> Mobius:
    while True:
        p, q, r, s = (crand(rng, lo, hi) for _ in range(4))
        if abs(q * r - p * s) > 0.2:
            return Mobius(p, q, r, s)


def random_equation(rng) -> RationalAIR:
    return RationalAIR.from_vector([crand(rng) for _ in range(10)])


def mobius_derivative(m: Mobius, v):
    return m.det / (m.r + m.s * v) ** 2


def rhs_after_y_substitution(eq: RationalAIR, m: Mobius, x, Y):
    """dY/dx when y = m(Y), straight from the chain rule."""
    return eq.rhs(x, m(Y)) / mobius_derivative(m, Y)


def rhs_after_x_substitution(eq: RationalAIR, m: Mobius, X, y):
    """dy/dX when x = m(X)."""
    return eq.rhs(m(X), y) * mobius_derivative(m, X)


def same_rhs(e1: RationalAIR, e2: RationalAIR, rng, n=8, rtol=1e-9):
    """Two equations agree as vector fields at random points (up to a constant factor)."""
    pts = [(crand(rng), crand(rng)) for _ in range(n)]
    v1 = np.array([e1.rhs(x, y) for x, y in pts])
    v2 = np.array([e2.rhs(x, y) for x, y in pts])
    k = int(np.argmax(np.abs(v2)))
    c = v1[k] / v2[k]
    return np.allclose(v1, c * v2, rtol=rtol, atol=rtol * np.max(np.abs(v1)))


# Parameters used by the acceptance criteria (kept away from integer loci).
AC_PARAMS = {
    ClassTag.C1: (1.1, 0.4, -0.7),
    ClassTag.C2: (0.9, 0.6),
    ClassTag.C3: (0.35, 1.45),
    ClassTag.C4: (0.5,),
    ClassTag.C5: (0.8,),
    ClassTag.C6: (),
}

CLASS_TAGS = [ClassTag.C1, ClassTag.C2, ClassTag.C3, ClassTag.C4, ClassTag.C5, ClassTag.C6]


def ac_class(tag: ClassTag) -> CanonicalClass:
    return CanonicalClass(tag, AC_PARAMS[tag])


def _far_from_int(z: complex, margin: float) -> bool:
    return abs(z - round(z.real)) >= margin


def random_class(tag: ClassTag, rng, box=1.5, margin=0.05) -> CanonicalClass:
    """Random parameters in the complex box, avoiding the integer loci the solvers reject."""
    n = len(AC_PARAMS[tag])
    while True:
        p = tuple(crand(rng, -box, box) for _ in range(n))
        if tag is ClassTag.C3 and not _far_from_int(1 + p[0] - p[1], margin):
            continue
        if tag is ClassTag.C4 and not _far_from_int(p[0], margin):
            continue
        # S and R sharing the root x = 0 would make these DegenerateLinear.
        if tag is ClassTag.C1 and (abs(p[0]) < 0.2 or min(abs(p[1]), abs(p[2])) < 0.1):
            continue
        if tag is ClassTag.C3 and min(abs(p[0]), abs(p[1])) < 0.1:
            continue
        if tag is ClassTag.C5 and abs(p[0]) < 0.1:
            continue
        if tag is ClassTag.C2 and abs(p[0]) < 0.2:
            continue
        return CanonicalClass(tag, p)
