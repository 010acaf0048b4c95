"""Physical inputs, quantum-number bookkeeping and the potential terms.

Units are natural (hbar = c = 1): masses and energies in fm^-1, lengths in fm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SymmetryMode",
    "PotentialParams",
    "QuantumNumbers",
    "ApproximationScheme",
    "D0_PRESETS",
    "resolve_d0",
    "hulthen",
    "coulomb_tensor",
    "approx_inv_r2",
    "exponents",
    "screening_factor",
]


class SymmetryMode(str, enum.Enum):
    """Which Dirac limit is in force.

    SPIN: the difference of vector and scalar potentials is a constant.
    PSEUDOSPIN: their sum is a constant.
    """

    SPIN = "spin"
    PSEUDOSPIN = "pseudospin"

    @classmethod
    def parse(cls, value: "str | SymmetryMode") -> "SymmetryMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown symmetry mode {value!r}; expected 'spin' or 'pseudospin'")


@dataclass(frozen=True)
class PotentialParams:
    """Mass, Hulthen range and depth, symmetry constant and tensor strength.

    ``C`` is the spin constant in spin mode and the pseudospin constant in
    pseudospin mode.
    """

    M: float
    r0: float
    V0: float
    C: float = 0.0
    H: float = 0.0

    def __post_init__(self) -> None:
        for name in ("M", "r0", "V0", "C", "H"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if not self.M > 0:
            raise ValueError(f"mass M must be positive, got {self.M!r}")
        if not self.r0 > 0:
            raise ValueError(f"range r0 must be positive, got {self.r0!r}")
        if not self.V0 > 0:
            raise ValueError(f"depth V0 must be positive, got {self.V0!r}")

    @property
    def delta(self) -> float:
        """Screening parameter 1/r0 in fm^-1."""
        return 1.0 / self.r0

    def replace(self, **changes: float) -> "PotentialParams":
        fields = {k: getattr(self, k) for k in ("M", "r0", "V0", "C", "H")}
        fields.update(changes)
        return PotentialParams(**fields)


_ORBITAL_LETTERS = "spdfghiklmnoqrtuvwxyz"


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial quantum number ``n`` and spin-orbit number ``kappa``."""

    n: int
    kappa: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"radial quantum number n must be a non-negative integer, got {self.n!r}")
        if int(self.kappa) != self.kappa or self.kappa == 0:
            raise ValueError(f"kappa must be a nonzero integer, got {self.kappa!r}")

    @property
    def l(self) -> int:
        return int(abs(self.kappa + 0.5) - 0.5)

    @property
    def l_pseudo(self) -> int:
        return int(abs(self.kappa - 0.5) - 0.5)

    @property
    def two_j(self) -> int:
        """Twice the total angular momentum, 2|kappa| - 1."""
        return 2 * abs(self.kappa) - 1

    @property
    def j(self) -> float:
        return abs(self.kappa) - 0.5

    def label(self, mode: "SymmetryMode | str" = SymmetryMode.SPIN) -> str:
        """Spectroscopic label such as ``1p1/2``; pseudospin uses the pseudo-orbital."""
        mode = SymmetryMode.parse(mode)
        ell = self.l if mode is SymmetryMode.SPIN else self.l_pseudo
        letter = _ORBITAL_LETTERS[ell] if ell < len(_ORBITAL_LETTERS) else f"[l={ell}]"
        return f"{self.n}{letter}{self.two_j}/2"


@dataclass(frozen=True)
class ApproximationScheme:
    """Constant added to the exponential model of the centrifugal term."""

    d0: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.d0) and self.d0 >= 0):
            raise ValueError(f"d0 must be a finite non-negative number, got {self.d0!r}")


D0_PRESETS: dict[str, float] = {
    "usual": 0.0,
    "twelfth": 1.0 / 12.0,
    "table3": 0.0823058167837972,
}


def resolve_d0(value: "str | float") -> float:
    """Turn a preset name or a number into a validated d0."""
    if isinstance(value, str):
        key = value.strip()
        if key.lower() in D0_PRESETS:
            return D0_PRESETS[key.lower()]
        try:
            value = float(key)
        except ValueError:
            raise ValueError(
                f"d0 must be a number or one of {sorted(D0_PRESETS)}, got {key!r}"
            ) from None
    return ApproximationScheme(float(value)).d0


def _check_radius(r) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("radius must be strictly positive")
    return arr


def _out(arr: np.ndarray):
    return arr if arr.ndim else float(arr)


def screening_factor(r, r0: float):
    """u(r) = 1/(exp(r/r0) - 1), computed with expm1 for small r."""
    x = _check_radius(r) / r0
    # e^-x / (1 - e^-x) never overflows; it underflows to 0 far out
    return _out(-np.exp(-x) / np.expm1(-x))


def hulthen(r, p: PotentialParams):
    """Hulthen well -V0/(exp(r/r0) - 1)."""
    return _out(-p.V0 * np.asarray(screening_factor(r, p.r0)))


def coulomb_tensor(r, p: PotentialParams):
    """Coulomb-like tensor term -H/r."""
    arr = _check_radius(r)
    return _out(-p.H / arr)


def approx_inv_r2(r, r0: float, d0: float):
    """Exponential stand-in for 1/r^2: (d0 + u + u^2)/r0^2 with u the screening factor."""
    if not r0 > 0:
        raise ValueError(f"r0 must be positive, got {r0!r}")
    u = np.asarray(screening_factor(r, r0))
    return _out((d0 + u + u * u) / (r0 * r0))


def exponents(q: QuantumNumbers, H: float, mode: "SymmetryMode | str") -> float:
    """Small-r exponent of the closed-form solution.

    kappa + H + 1 for spin symmetry, kappa + H for pseudospin symmetry.
    """
    mode = SymmetryMode.parse(mode)
    if mode is SymmetryMode.SPIN:
        return q.kappa + H + 1.0
    return q.kappa + H
