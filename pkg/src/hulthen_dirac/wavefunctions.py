"""Closed-form radial spinor components and their normalisation.

With z = exp(-r/r0) the large component of a level with decay constant lam
and small-r exponent eta is

    F(r) = N z^lam (1 - z)^eta 2F1(-n, n + 2 lam + 2 eta; 2 lam + 1; z)
         = N c_n z^lam (1 - z)^eta P_n^(2 lam, 2 eta - 1)(1 - 2 z),

c_n = n! Gamma(2 lam + 1) / Gamma(n + 2 lam + 1). The companion component
follows from the first-order Dirac relation and the derivative rule
d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .model import SymmetryMode
from .special_functions import JacobiParams, hyp2f1_terminating, jacobi_P, ln_gamma
from .spectrum import BoundState, StateStatus, nu_problem

__all__ = [
    "NormalizationDomainError",
    "SingularSymmetryError",
    "SpinorComponents",
    "radial_profile",
    "normalization_constant",
    "norm_by_quadrature",
    "upper_component",
    "lower_component",
    "pseudospin_lower_component",
    "pseudospin_upper_component",
    "spinor",
    "z_equation_residual",
    "count_nodes",
]


class NormalizationDomainError(ValueError):
    """The level has no finite normalisation in closed form or by quadrature."""


class SingularSymmetryError(ZeroDivisionError):
    """The coupling factor between the two components vanishes."""


def _radius(r) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("radius must be strictly positive")
    return arr


def _out(a):
    return a if np.ndim(a) else float(a)


def _hyp_b(n: int, lam: float, eta: float) -> float:
    return n + 2.0 * lam + 2.0 * eta


def _ln_jacobi_prefactor(n: int, lam: float) -> float:
    return ln_gamma(n + 1.0) + ln_gamma(2.0 * lam + 1.0) - ln_gamma(n + 2.0 * lam + 1.0)


def radial_profile(n: int, lam: float, eta: float, r0: float, r, form: str = "hypergeometric"):
    """Unnormalised z^lam (1-z)^eta times the degree-n polynomial factor.

    ``form`` selects the terminating 2F1 sum or the Jacobi polynomial
    (rescaled so both agree).
    """
    r = _radius(r)
    t = r / r0
    z = np.exp(-t)
    one_minus_z = -np.expm1(-t)
    env = np.exp(-lam * t) * one_minus_z ** eta
    if form == "hypergeometric":
        poly = hyp2f1_terminating(n, _hyp_b(n, lam, eta), 2.0 * lam + 1.0, z)
    elif form == "jacobi":
        pre = math.exp(_ln_jacobi_prefactor(n, lam))
        poly = pre * np.asarray(jacobi_P(JacobiParams(n, 2.0 * lam, 2.0 * eta - 1.0), 1.0 - 2.0 * z))
    else:
        raise ValueError(f"unknown form {form!r}; use 'hypergeometric' or 'jacobi'")
    return _out(env * poly)


def _check_state(state: BoundState) -> None:
    if state.status is StateStatus.MIRROR:
        raise NormalizationDomainError(
            f"{state.label()} is a mirror level (A = {state.A:g} < 0); it has no spinor of its own"
        )


def normalization_constant(state: BoundState) -> float:
    """N such that the large component has unit norm over (0, inf).

    Closed form (valid for lam > 0 and eta > 0):

        N^-2 = r0 Gamma(2lam+1)^2 n! Gamma(n+2eta) (n+eta)
               / (Gamma(n+2lam+1) Gamma(n+2lam+2eta) 2 lam (n+lam+eta)).

    For -1/2 < eta <= 0 the integral is still finite and is done by
    quadrature; below that the component is not square integrable.
    """
    _check_state(state)
    n, lam, eta, r0 = state.n, state.lam, state.exponent, state.params.r0
    if not lam > 0:
        raise NormalizationDomainError(f"decay constant {lam!r} is not positive")
    if eta > 0:
        ln_inv_sq = (math.log(r0) + ln_gamma(n + 1.0) + 2.0 * ln_gamma(2.0 * lam + 1.0)
                     - ln_gamma(n + 2.0 * lam + 1.0) + ln_gamma(n + 2.0 * eta)
                     - ln_gamma(n + 2.0 * lam + 2.0 * eta)
                     + math.log(n + eta) - math.log(2.0 * lam) - math.log(n + lam + eta))
        return math.exp(-0.5 * ln_inv_sq)
    if eta > -0.5:
        integral = _square_integral(lambda r: radial_profile(n, lam, eta, r0, r), r0, lam)
        return 1.0 / math.sqrt(integral)
    raise NormalizationDomainError(f"exponent {eta!r} makes the component non-normalisable")


def _square_integral(func: Callable[[float], float], r0: float, lam: float) -> float:
    # integrate func^2 on (0, R] with R where exp(-2 lam r / r0) < 1e-17
    r_end = max(60.0 * r0, 20.0 * r0 / lam)
    edges = [0.0, 0.01 * r0, 0.1 * r0, r0]
    while edges[-1] < r_end:
        edges.append(min(edges[-1] * 2.0, r_end))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = quad(lambda r: func(r) ** 2 if r > 0 else 0.0, a, b,
                      epsabs=1e-15, epsrel=1e-13, limit=200)
        total += val
    return total


def norm_by_quadrature(state: BoundState) -> float:
    """Adaptive Gauss-Kronrod value of the integral of F^2 with F normalised."""
    if state.mode is SymmetryMode.SPIN:
        f = lambda r: upper_component(state, r)  # noqa: E731
    else:
        f = lambda r: pseudospin_lower_component(state, r)  # noqa: E731
    return _square_integral(f, state.params.r0, state.lam)


def _require_mode(state: BoundState, mode: SymmetryMode) -> None:
    if state.mode is not mode:
        raise ValueError(f"expected a {mode.value} level, got {state.mode.value}")


def upper_component(state: BoundState, r, form: str = "hypergeometric"):
    """Normalised large component F(r) of a spin level."""
    _require_mode(state, SymmetryMode.SPIN)
    N = normalization_constant(state)
    return _out(N * np.asarray(radial_profile(state.n, state.lam, state.exponent,
                                              state.params.r0, r, form)))


def _derivative_bracket(state: BoundState, r: np.ndarray, orbital: float):
    # r0 * d/dr of z^lam (1-z)^eta f(z) plus orbital*r0/r times the same, divided by the envelope
    n, lam, eta, r0 = state.n, state.lam, state.exponent, state.params.r0
    t = r / r0
    z = np.exp(-t)
    u = 1.0 / np.expm1(t)           # z / (1 - z)
    b = _hyp_b(n, lam, eta)
    c = 2.0 * lam + 1.0
    f = np.asarray(hyp2f1_terminating(n, b, c, z))
    if n > 0:
        df = n * b / c * np.asarray(hyp2f1_terminating(n - 1, b + 1.0, c + 1.0, z))
    else:
        df = np.zeros_like(z)
    env = np.exp(-lam * t) * (-np.expm1(-t)) ** eta
    return env * ((-lam + eta * u + orbital * r0 / r) * f + z * df)


def lower_component(state: BoundState, r):
    """Small component G = (d/dr + (kappa + H)/r) F / (M + E - C) of a spin level."""
    _require_mode(state, SymmetryMode.SPIN)
    p = state.params
    denom = p.M + state.E - p.C
    if denom == 0:
        raise SingularSymmetryError("M + E - C vanishes; the small component is undefined")
    r = _radius(r)
    N = normalization_constant(state)
    bracket = _derivative_bracket(state, r, state.kappa + p.H)
    return _out(N * bracket / (p.r0 * denom))


def pseudospin_lower_component(state: BoundState, r, form: str = "jacobi"):
    """Normalised small component G(r) of a pseudospin level (Jacobi form by default)."""
    _require_mode(state, SymmetryMode.PSEUDOSPIN)
    N = normalization_constant(state)
    return _out(N * np.asarray(radial_profile(state.n, state.lam, state.exponent,
                                              state.params.r0, r, form)))


def pseudospin_upper_component(state: BoundState, r):
    """Large component F = (d/dr - (kappa + H)/r) G / (M - E + C) of a pseudospin level."""
    _require_mode(state, SymmetryMode.PSEUDOSPIN)
    p = state.params
    denom = p.M - state.E + p.C
    if denom == 0:
        raise SingularSymmetryError("M - E + C vanishes; the large component is undefined")
    r = _radius(r)
    N = normalization_constant(state)
    bracket = _derivative_bracket(state, r, -(state.kappa + p.H))
    return _out(N * bracket / (p.r0 * denom))


@dataclass(frozen=True)
class SpinorComponents:
    """Radial pair (F, G) of a level with the constant that normalises it."""

    F: Callable
    G: Callable
    norm_const: float
    state: BoundState


def spinor(state: BoundState) -> SpinorComponents:
    if state.mode is SymmetryMode.SPIN:
        F = lambda r: upper_component(state, r)  # noqa: E731
        G = lambda r: lower_component(state, r)  # noqa: E731
    else:
        F = lambda r: pseudospin_upper_component(state, r)  # noqa: E731
        G = lambda r: pseudospin_lower_component(state, r)  # noqa: E731
    return SpinorComponents(F=F, G=G, norm_const=normalization_constant(state), state=state)


def z_equation_residual(state: BoundState, z) -> tuple[np.ndarray, np.ndarray]:
    """Residual of the z-space equation for the closed-form component.

    Returns (residual, scale) where scale is the largest of the three term
    magnitudes u'', u'/z and |q2 z^2 - q1 z + q0| u / (z (1-z))^2. The
    coefficients q0, q1, q2 are rebuilt from the energy, not from lam.
    """
    _check_state(state)
    z = np.asarray(z, dtype=float)
    n, lam, eta = state.n, state.lam, state.exponent
    q = nu_problem(state.E, state.params, state.qn, state.d0, state.mode)
    b = _hyp_b(n, lam, eta)
    c = 2.0 * lam + 1.0
    f = np.asarray(hyp2f1_terminating(n, b, c, z))
    f1 = (-n * b / c * np.asarray(hyp2f1_terminating(n - 1, b + 1.0, c + 1.0, z))
          if n >= 1 else np.zeros_like(z))
    f2 = (n * b / c * (n - 1) * (b + 1.0) / (c + 1.0)
          * np.asarray(hyp2f1_terminating(n - 2, b + 2.0, c + 2.0, z))
          if n >= 2 else np.zeros_like(z))
    phi = z ** lam * (1.0 - z) ** eta
    g1 = lam / z - eta / (1.0 - z)                      # phi'/phi
    g2 = g1 * g1 - lam / z ** 2 - eta / (1.0 - z) ** 2  # phi''/phi
    u = phi * f
    du = phi * (g1 * f + f1)
    d2u = phi * (g2 * f + 2.0 * g1 * f1 + f2)
    pot = (q.q2 * z * z - q.q1 * z + q.q0) / (z * (1.0 - z)) ** 2 * u
    first = du / z
    res = d2u + first - pot
    scale = np.maximum.reduce([np.abs(d2u), np.abs(first), np.abs(pot)])
    return res, scale


def count_nodes(values) -> int:
    """Number of sign changes in a sampled function, ignoring exact zeros."""
    v = np.asarray(values, dtype=float)
    s = np.sign(v[v != 0.0])
    return int(np.count_nonzero(s[1:] != s[:-1]))
