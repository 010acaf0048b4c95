"""Dirac bound states in a Hulthen well with a Coulomb-like tensor term."""

from .model import (
    D0_PRESETS,
    PotentialParams,
    QuantumNumbers,
    SymmetryMode,
    resolve_d0,
)
from .spectrum import BoundState, NoBoundState, StateStatus, enumerate_levels, solve_energy

__all__ = [
    "D0_PRESETS",
    "PotentialParams",
    "QuantumNumbers",
    "SymmetryMode",
    "resolve_d0",
    "BoundState",
    "NoBoundState",
    "StateStatus",
    "enumerate_levels",
    "solve_energy",
]

__version__ = "0.1.0"
