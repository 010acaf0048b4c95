"""Parametric Nikiforov-Uvarov solver.

Handles equations of the form

    u'' + (c1 - c2 z) / (z (1 - c3 z)) u'
        + (-q2 z^2 + q1 z - q0) / (z (1 - c3 z))^2 u = 0

by building the constants c4..c13, the auxiliary polynomials pi(z) and
tau(z), the constant k, the quantisation condition and the polynomial
solution. Energies stay hidden inside the q's; finding the energy that zeroes
the quantisation condition is the caller's business.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_functions import JacobiParams, hyp2f1_terminating, jacobi_P, ln_gamma

__all__ = [
    "NoNuSolution",
    "NuProblem",
    "NuSolution",
    "derive_constants",
    "nu_energy_residual",
    "nu_wavefunction",
]


class NoNuSolution(ValueError):
    """The parametric constants do not define an admissible solution."""


@dataclass(frozen=True)
class NuProblem:
    """Coefficients (c1, c2, c3) of the first-derivative term and (q0, q1, q2) of the potential term."""

    c1: float
    c2: float
    c3: float
    q0: float
    q1: float
    q2: float

    def __post_init__(self) -> None:
        if self.c3 == 0:
            raise ValueError("c3 = 0 (purely polynomial sigma) is not supported")


@dataclass(frozen=True)
class NuSolution:
    """All derived constants plus the polynomials built from them.

    ``root_signs`` records the branch chosen for (sqrt(c8), sqrt(c9)).
    ``pi_coeffs`` and ``tau_coeffs`` are (intercept, slope) pairs.
    """

    problem: NuProblem
    root_signs: tuple[int, int]
    c4: float
    c5: float
    c6: float
    c7: float
    c8: float
    c9: float
    c10: float
    c11: float
    c12: float
    c13: float
    pi_coeffs: tuple[float, float]
    k: float
    tau_coeffs: tuple[float, float]

    @property
    def sqrt_c8(self) -> float:
        return self.root_signs[0] * math.sqrt(self.c8)

    @property
    def sqrt_c9(self) -> float:
        return self.root_signs[1] * math.sqrt(self.c9)

    def constants(self) -> dict[str, float]:
        p = self.problem
        out = {"c1": p.c1, "c2": p.c2, "c3": p.c3}
        for i in range(4, 14):
            out[f"c{i}"] = getattr(self, f"c{i}")
        return out

    def energy_residual(self, n: int) -> float:
        return nu_energy_residual(self, n)

    def pi(self, z):
        a, b = self.pi_coeffs
        return a + b * np.asarray(z, dtype=float)

    def tau(self, z):
        a, b = self.tau_coeffs
        return a + b * np.asarray(z, dtype=float)

    def weight(self, z):
        """rho(z) = z^c10 (1 - c3 z)^c11."""
        z = np.asarray(z, dtype=float)
        return z ** self.c10 * (1.0 - self.problem.c3 * z) ** self.c11

    def envelope(self, z):
        """phi(z) = z^c12 (1 - c3 z)^c13."""
        z = np.asarray(z, dtype=float)
        return z ** self.c12 * (1.0 - self.problem.c3 * z) ** self.c13


def _snap(value: float, *terms: float) -> float:
    # a radicand that cancels to rounding level is zero; its sign is noise
    scale = sum(abs(t) for t in terms)
    return 0.0 if abs(value) <= 64.0 * np.finfo(float).eps * scale else value


def derive_constants(p: NuProblem, root_signs: tuple[int, int] = (1, 1),
                     require_decreasing_tau: bool = True) -> NuSolution:
    """Build c4..c13, pi(z), k and tau(z) for ``p``.

    ``root_signs`` picks the branch of sqrt(c8) and sqrt(c9). The default is
    the principal branch. Raises :class:`NoNuSolution` when c8 or c9 is
    negative or when the resulting tau(z) is not decreasing. Passing
    ``require_decreasing_tau=False`` skips the last test, which is only
    useful for evaluating the quantisation condition on a non-normalisable
    branch.
    """
    s8, s9 = (int(s) for s in root_signs)
    if s8 not in (1, -1) or s9 not in (1, -1):
        raise ValueError(f"root_signs entries must be +1 or -1, got {root_signs!r}")
    c1, c2, c3 = p.c1, p.c2, p.c3
    c4 = 0.5 * (1.0 - c1)
    c5 = 0.5 * (c2 - 2.0 * c3)
    c6 = c5 * c5 + p.q2
    c7 = 2.0 * c4 * c5 - p.q1
    c8 = _snap(c4 * c4 + p.q0, c4 * c4, p.q0)
    c9 = _snap(c3 * (c7 + c3 * c8) + c6, c3 * c7, c3 * c3 * c8, c6)
    if c8 < 0:
        raise NoNuSolution(f"no NU solution: c8 = {c8:.6g} is negative")
    if c9 < 0:
        raise NoNuSolution(f"no NU solution: c9 = {c9:.6g} is negative")
    r8 = s8 * math.sqrt(c8)
    r9 = s9 * math.sqrt(c9)
    c10 = c1 + 2.0 * c4 + 2.0 * r8 - 1.0
    c11 = 1.0 - c1 - 2.0 * c4 + 2.0 * r9 / c3
    c12 = c4 + r8
    c13 = -c4 + (r9 - c5) / c3
    pi_coeffs = (c4 + r8, c5 - (r9 + c3 * r8))
    k = -(c7 + 2.0 * c3 * c8) - 2.0 * r8 * r9
    tau_coeffs = (c1 + 2.0 * c4 + 2.0 * r8, -(c2 - 2.0 * c5) - 2.0 * (r9 + c3 * r8))
    if require_decreasing_tau and not tau_coeffs[1] < 0:
        raise NoNuSolution(
            f"no NU solution: tau'(z) = {tau_coeffs[1]:.6g} is not negative on this branch"
        )
    return NuSolution(
        problem=p, root_signs=(s8, s9),
        c4=c4, c5=c5, c6=c6, c7=c7, c8=c8, c9=c9,
        c10=c10, c11=c11, c12=c12, c13=c13,
        pi_coeffs=pi_coeffs, k=k, tau_coeffs=tau_coeffs,
    )


def nu_energy_residual(s: NuSolution, n: int) -> float:
    """Left-hand side of the NU quantisation condition at level ``n``."""
    p = s.problem
    c3 = p.c3
    r8, r9 = s.sqrt_c8, s.sqrt_c9
    return ((p.c2 - c3) * n + c3 * n * n - (2 * n + 1) * s.c5
            + (2 * n + 1) * (r9 + c3 * r8) + s.c7 + 2.0 * c3 * s.c8 + 2.0 * r8 * r9)


def _check_z(s: NuSolution, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    upper = 1.0 / s.problem.c3
    if np.any(~((z > 0) & (z < upper))):
        raise ValueError(f"z must lie in (0, {upper:.6g})")
    return z


def nu_wavefunction(s: NuSolution, n: int, z, form: str = "hypergeometric"):
    """Unnormalised polynomial solution at level ``n``.

    ``form="hypergeometric"`` sums z^c12 (1-c3 z)^c13 2F1(-n, 1+c10+c11+n; c10+1; c3 z).
    ``form="jacobi"`` evaluates z^c12 (1-c3 z)^c13 P_n^(c10, c11)(1 - 2 c3 z) and
    rescales it by n! Gamma(c10+1)/Gamma(n+c10+1) so both forms coincide.
    """
    if not (s.c12 > 0 and s.c13 > 0):
        raise NoNuSolution(
            f"envelope exponents must be positive (c12={s.c12:.6g}, c13={s.c13:.6g})"
        )
    z = _check_z(s, z)
    c3 = s.problem.c3
    env = s.envelope(z)
    if form == "hypergeometric":
        poly = hyp2f1_terminating(n, 1.0 + s.c10 + s.c11 + n, s.c10 + 1.0, c3 * z)
    elif form == "jacobi":
        scale = math.exp(ln_gamma(n + 1.0) + ln_gamma(s.c10 + 1.0) - ln_gamma(n + s.c10 + 1.0))
        poly = scale * np.asarray(jacobi_P(JacobiParams(n, s.c10, s.c11), 1.0 - 2.0 * c3 * z))
    else:
        raise ValueError(f"unknown form {form!r}; use 'hypergeometric' or 'jacobi'")
    out = env * poly
    return out if np.ndim(out) else float(out)
