"""Hypergeometric-family special functions in complex double precision.

Everything is built on one generalised hypergeometric series loop
(:func:`hyp_series`). Series never truncate silently: they either meet the
relative tolerance or raise :class:`ConvergenceError`.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import ConvergenceError, DomainError, InvalidArgumentError, PoleError, UnsupportedParameterError

PERTURBATION = 1e-6

_DIRECT_RADIUS = 0.8
_MAX_RADIUS = 0.95


@dataclass(frozen=True)
class SeriesConfig:
    rel_tol: float = 1e-15
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidArgumentError("rel_tol must be positive")
        if self.max_terms < 1:
            raise InvalidArgumentError("max_terms must be at least 1")


DEFAULT = SeriesConfig()


def _nonpositive_int(z: complex, tol: float = 1e-12) -> bool:
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    n = round(z.real)
    return n <= 0 and abs(z.real - n) <= tol


def _near_int(z: complex, tol: float) -> int | None:
    z = complex(z)
    n = round(z.real)
    if abs(z - n) <= tol:
        return int(n)
    return None


def hyp_series(a: Sequence[complex], b: Sequence[complex], z: complex, cfg: SeriesConfig = DEFAULT) -> complex:
    """Sum of the pFq series with no transformation applied."""
    for bj in b:
        if _nonpositive_int(bj):
            raise PoleError(f"lower parameter {bj} is a non-positive integer")
    z = complex(z)
    total = 1 + 0j
    term = 1 + 0j
    small = 0
    for n in range(cfg.max_terms):
        num = 1 + 0j
        for ai in a:
            num *= ai + n
        den = n + 1 + 0j
        for bj in b:
            den *= bj + n
        term *= num / den * z
        total += term
        if term == 0:
            return total
        if abs(term) <= cfg.rel_tol * abs(total):
            small += 1
            if small == 2:
                return total
        else:
            small = 0
    raise ConvergenceError(f"series did not converge in {cfg.max_terms} terms (z={z})")


# ------------------------------------------------------------------- gamma

_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def sinpi(z: complex) -> complex:
    """sin(pi z) with the integer part removed first, accurate near integers."""
    z = complex(z)
    n = round(z.real)
    v = cmath.sin(cmath.pi * (z - n))
    return -v if n % 2 else v


def cospi(z: complex) -> complex:
    z = complex(z)
    n = round(z.real)
    v = cmath.cos(cmath.pi * (z - n))
    return -v if n % 2 else v


def gamma(z: complex) -> complex:
    """Gamma function: Lanczos sum for Re z >= 1/2, reflection otherwise."""
    z = complex(z)
    if _nonpositive_int(z, 0.0):
        raise PoleError(f"gamma has a pole at {z}")
    if z.real < 0.5:
        return cmath.pi / (sinpi(z) * gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def rgamma(z: complex) -> complex:
    """1/Gamma(z), zero at the poles."""
    if _nonpositive_int(z, 0.0):
        return 0j
    return 1 / gamma(z)


def _power(z: complex, nu: complex) -> complex:
    """Principal branch of z**nu."""
    if z == 0:
        if complex(nu).real > 0:
            return 0j
        if nu == 0:
            return 1 + 0j
        raise DomainError("0 raised to a power with non-positive real part")
    return cmath.exp(nu * cmath.log(z))


# ------------------------------------------------------------------- 2F1


def hyp2f1(a, b, c, z, cfg: SeriesConfig = DEFAULT) -> complex:
    """Gauss hypergeometric function.

    Direct series for |z| <= 0.8, Pfaff's transformation z -> z/(z-1)
    beyond that. Points where neither |z| nor |z/(z-1)| is <= 0.95 raise
    :class:`DomainError`, except for terminating (polynomial) series.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _nonpositive_int(c):
        raise PoleError(f"2F1 lower parameter c={c} is a non-positive integer")
    if _nonpositive_int(a) or _nonpositive_int(b) or abs(z) <= _DIRECT_RADIUS:
        return hyp_series((a, b), (c,), z, cfg)
    if z == 1:
        raise DomainError("2F1 evaluated at the singular point z = 1")
    w = z / (z - 1)
    if abs(w) <= _MAX_RADIUS and abs(w) < abs(z):
        return _power(1 - z, -a) * hyp_series((a, c - b), (c,), w, cfg)
    if abs(z) <= _MAX_RADIUS:
        return hyp_series((a, b), (c,), z, cfg)
    raise DomainError(f"2F1 argument z={z} outside the supported region")


# ------------------------------------------------------------------- Kummer


def kummer_M(a, b, z, cfg: SeriesConfig = DEFAULT) -> complex:
    """M(a, b, z) = 1F1(a; b; z); Kummer's transformation for Re z < 0."""
    a, b, z = complex(a), complex(b), complex(z)
    if _nonpositive_int(b):
        raise PoleError(f"1F1 lower parameter b={b} is a non-positive integer")
    if z.real < 0 and not _nonpositive_int(a):
        return cmath.exp(z) * hyp_series((b - a,), (b,), -z, cfg)
    return hyp_series((a,), (b,), z, cfg)


def kummer_M_prime(a, b, z, cfg: SeriesConfig = DEFAULT) -> complex:
    a, b = complex(a), complex(b)
    return a / b * kummer_M(a + 1, b + 1, z, cfg)


def _integer_guard(value: complex, what: str, perturb: bool) -> int | None:
    """Nearest integer if ``value`` is one (within 1e-9), after the perturb check."""
    n = _near_int(value, 1e-9)
    if n is None:
        return None
    if not perturb:
        raise UnsupportedParameterError(
            f"{what}={value} is an integer; the logarithmic limit is not implemented. "
            f"Pass perturb=True to evaluate at {what}={n}+-{PERTURBATION:g}"
        )
    warnings.warn(
        f"{what}={n} is an integer; using the mean of the values at {what}={n}+-{PERTURBATION:g}",
        RuntimeWarning,
        stacklevel=3,
    )
    return n


def kummer_U(a, b, z, cfg: SeriesConfig = DEFAULT, *, perturb: bool = False) -> complex:
    """Tricomi's U through the M connection formula (principal z**(1-b)).

    At integer ``b`` with ``perturb=True`` the result is the mean of the
    values at ``b +- PERTURBATION``; the O(eps) terms cancel, leaving an
    error near 1e-10.
    """
    a, z = complex(a), complex(z)
    if z == 0:
        raise DomainError("U(a, b, z) is singular at z = 0")
    n = _integer_guard(b, "b", perturb)
    if n is not None:
        return (_kummer_U(a, n + PERTURBATION, z, cfg) + _kummer_U(a, n - PERTURBATION, z, cfg)) / 2
    return _kummer_U(a, complex(b), z, cfg)


def _kummer_U(a, b, z, cfg):
    first = gamma(1 - b) * rgamma(a - b + 1) * kummer_M(a, b, z, cfg)
    second = gamma(b - 1) * rgamma(a) * _power(z, 1 - b) * kummer_M(a - b + 1, 2 - b, z, cfg)
    return first + second


def kummer_U_prime(a, b, z, cfg: SeriesConfig = DEFAULT, *, perturb: bool = False) -> complex:
    a, b = complex(a), complex(b)
    return -a * kummer_U(a + 1, b + 1, z, cfg, perturb=perturb)


# ------------------------------------------------------------------- 0F1, Bessel


def hyp0f1(b, z, cfg: SeriesConfig = DEFAULT) -> complex:
    if _nonpositive_int(b):
        raise PoleError(f"0F1 parameter b={b} is a non-positive integer")
    return hyp_series((), (complex(b),), z, cfg)


def bessel_J(nu, z, cfg: SeriesConfig = DEFAULT) -> complex:
    nu, z = complex(nu), complex(z)
    if _nonpositive_int(nu + 1, 0.0):
        n = -round(nu.real)
        return (-1) ** n * bessel_J(n, z, cfg)
    if z == 0:
        return 1 + 0j if nu == 0 else _power(0j, nu)
    return _power(z / 2, nu) * rgamma(nu + 1) * hyp0f1(nu + 1, -z * z / 4, cfg)


def bessel_Y(nu, z, cfg: SeriesConfig = DEFAULT, *, perturb: bool = True) -> complex:
    """Bessel function of the second kind.

    Integer orders are evaluated as the mean over ``nu +- PERTURBATION``
    (with a warning) unless ``perturb`` is false, in which case they are
    rejected.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("Y_nu is singular at z = 0")
    n = _integer_guard(nu, "nu", perturb)
    if n is not None:
        return (_bessel_Y(n + PERTURBATION, z, cfg) + _bessel_Y(n - PERTURBATION, z, cfg)) / 2
    return _bessel_Y(complex(nu), z, cfg)


def _bessel_Y(nu, z, cfg):
    return (bessel_J(nu, z, cfg) * cospi(nu) - bessel_J(-nu, z, cfg)) / sinpi(nu)


# ------------------------------------------------------------------- Airy

# Ai(0) and -Ai'(0)
_AI0 = 1 / (3 ** (2 / 3) * gamma(2 / 3).real)
_AIP0 = 1 / (3 ** (1 / 3) * gamma(1 / 3).real)
_SQRT3 = math.sqrt(3)


def _airy_parts(z, cfg):
    z = complex(z)
    w = z**3 / 9
    f = hyp0f1(2 / 3, w, cfg)
    g = z * hyp0f1(4 / 3, w, cfg)
    return f, g


def _airy_prime_parts(z, cfg):
    z = complex(z)
    w = z**3 / 9
    fp = z * z / 2 * hyp0f1(5 / 3, w, cfg)
    gp = hyp0f1(4 / 3, w, cfg) + z**3 / 4 * hyp0f1(7 / 3, w, cfg)
    return fp, gp


def airy_Ai(z, cfg: SeriesConfig = DEFAULT) -> complex:
    f, g = _airy_parts(z, cfg)
    return _AI0 * f - _AIP0 * g


def airy_Bi(z, cfg: SeriesConfig = DEFAULT) -> complex:
    f, g = _airy_parts(z, cfg)
    return _SQRT3 * (_AI0 * f + _AIP0 * g)


def airy_Ai_prime(z, cfg: SeriesConfig = DEFAULT) -> complex:
    fp, gp = _airy_prime_parts(z, cfg)
    return _AI0 * fp - _AIP0 * gp


def airy_Bi_prime(z, cfg: SeriesConfig = DEFAULT) -> complex:
    fp, gp = _airy_prime_parts(z, cfg)
    return _SQRT3 * (_AI0 * fp + _AIP0 * gp)
