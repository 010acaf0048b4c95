"""Gamma function, Jacobi polynomials and terminating Gauss series.

Everything here is evaluated from scratch: a Lanczos approximation for
``ln Gamma``, the standard three-term recurrence for ``P_n^(alpha, beta)``
and a direct term-ratio sum for ``2F1(-n, b; c; z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "JacobiParams",
    "ln_gamma",
    "gamma_ratio",
    "pochhammer",
    "jacobi_P",
    "hyp2f1_terminating",
]

# Lanczos coefficients for g = 7, n = 9 (double precision set).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
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
_HALF_LN_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_ln_gamma(x: float) -> float:
    # valid for x >= 0.5
    xm1 = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (xm1 + k)
    t = xm1 + _LANCZOS_G + 0.5
    return _HALF_LN_TWO_PI + (xm1 + 0.5) * math.log(t) - t + math.log(acc)


def _zeta_table(kmax: int = 40) -> tuple[float, ...]:
    # zeta(k) for k = 2..kmax by a partial sum plus an Euler-Maclaurin tail
    out = []
    N = 60
    for k in range(2, kmax + 1):
        head = math.fsum(m ** -float(k) for m in range(1, N))
        tail = (N ** (1.0 - k) / (k - 1) + 0.5 * N ** -float(k)
                + k * N ** (-k - 1.0) / 12.0
                - k * (k + 1) * (k + 2) * N ** (-k - 3.0) / 720.0)
        out.append(head + tail)
    return tuple(out)


_ZETA = _zeta_table()
_EULER_GAMMA = 0.57721566490153286061


def _ln_gamma_one_plus(e: float) -> float:
    # Taylor series of ln Gamma(1 + e) about e = 0, used for |e| <= 0.2
    acc = 0.0
    p = -e
    for k, z in enumerate(_ZETA, start=2):
        p *= -e
        acc += z * p / k
    return acc - _EULER_GAMMA * e


def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for real x > 0.

    Near the zeros at x = 1 and x = 2 a Taylor series keeps the result
    accurate in the relative sense; elsewhere a Lanczos sum is used, with
    arguments below 1/2 lifted by the recurrence.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise ValueError(f"ln_gamma needs a finite positive argument, got {x!r}")
    shift = 0.0
    while x < 0.5:
        shift -= math.log(x)
        x += 1.0
    if abs(x - 1.0) <= 0.2:
        return shift + _ln_gamma_one_plus(x - 1.0)
    if abs(x - 2.0) <= 0.2:
        e = x - 2.0
        return shift + _ln_gamma_one_plus(e) + math.log1p(e)
    return shift + _lanczos_ln_gamma(x)


def gamma_ratio(num: tuple[float, ...], den: tuple[float, ...]) -> float:
    """Return prod Gamma(num) / prod Gamma(den) evaluated in log space."""
    s = sum(ln_gamma(a) for a in num) - sum(ln_gamma(b) for b in den)
    return math.exp(s)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k for integer k >= 0."""
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


@dataclass(frozen=True)
class JacobiParams:
    """Degree and the two weight exponents of a Jacobi polynomial."""

    n: int
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Jacobi degree must be a non-negative integer, got {self.n!r}")
        if not self.alpha > -1.0:
            raise ValueError(f"Jacobi alpha must exceed -1, got {self.alpha!r}")
        if not self.beta > -1.0:
            raise ValueError(f"Jacobi beta must exceed -1, got {self.beta!r}")


def jacobi_P(p: JacobiParams, x):
    """Evaluate P_n^(alpha, beta)(x) by upward three-term recurrence.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    n, a, b = int(p.n), float(p.alpha), float(p.beta)
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    ab = a + b
    a2b2 = a * a - b * b
    for k in range(2, n + 1):
        s = 2.0 * k + ab
        c_lead = 2.0 * k * (k + ab) * (s - 2.0)
        c_mid = (s - 1.0) * (s * (s - 2.0) * x + a2b2)
        c_low = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s
        p0, p1 = p1, (c_mid * p1 - c_low * p0) / c_lead
    return p1 if p1.ndim else float(p1)


def _terminating_sum(n: int, b: float, c: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # the sum and the sum of absolute terms, which bounds its rounding error
    term = np.ones_like(z)
    total = np.ones_like(z)
    magnitude = np.ones_like(z)
    for k in range(n):
        term = term * ((k - n) * (b + k) / ((c + k) * (k + 1.0))) * z
        total = total + term
        magnitude = magnitude + np.abs(term)
    return total, magnitude


def _exact_sum(n: int, b: float, c: float, z: float) -> float:
    # float inputs are exact binary rationals, so this rounds only once
    b_, c_, z_ = Fraction(b), Fraction(c), Fraction(z)
    term = total = Fraction(1)
    for k in range(n):
        term = term * (k - n) * (b_ + k) * z_ / ((c_ + k) * (k + 1))
        total += term
    return float(total)


# relative rounding bound above which a point is re-summed exactly
_EXACT_THRESHOLD = 1e-14


def hyp2f1_terminating(n: int, b: float, c: float, z):
    """Sum the finite series 2F1(-n, b; c; z) = sum_k (-n)_k (b)_k z^k / ((c)_k k!).

    The alternating sum can cancel badly, so the equivalent series in 1 - z,

        2F1(-n, b; c; z) = (c-b)_n/(c)_n 2F1(-n, b; b-c-n+1; 1-z),

    is summed as well (unless its lower parameter is a non-positive integer)
    and whichever carries the smaller rounding bound is kept. Points where
    even that bound is poor are summed again in exact rational arithmetic.
    Raises ``ValueError`` when ``c`` is a non-positive integer, where the
    Gamma-function form of the series has poles.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"series length must be a non-negative integer, got {n!r}")
    if c <= 0 and float(c).is_integer():
        raise ValueError(f"2F1 lower parameter c={c!r} is a non-positive integer")
    n, b, c = int(n), float(b), float(c)
    z = np.asarray(z, dtype=float)
    total, bound = _terminating_sum(n, b, c, z)
    c_reflected = b - c - n + 1.0
    if n > 0 and not (c_reflected <= 0 and c_reflected.is_integer()):
        scale = pochhammer(c - b, n) / pochhammer(c, n)
        other, other_mag = _terminating_sum(n, b, c_reflected, 1.0 - z)
        use_other = abs(scale) * other_mag < bound
        total = np.where(use_other, scale * other, total)
        bound = np.where(use_other, abs(scale) * other_mag, bound)
    poor = (n > 1) & (np.finfo(float).eps * bound > _EXACT_THRESHOLD * np.abs(total)) & np.isfinite(z)
    if np.any(poor):
        total = np.array(total, dtype=float, copy=True)
        flat_z, flat_t, flat_p = z.reshape(-1), total.reshape(-1), poor.reshape(-1)
        for i in np.flatnonzero(flat_p):
            flat_t[i] = _exact_sum(n, b, c, float(flat_z[i]))
    return total if total.ndim else float(total)
