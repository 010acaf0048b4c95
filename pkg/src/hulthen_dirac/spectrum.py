"""Closed-form energy levels in the spin and pseudospin limits.

Both limits reduce to the same quadratic once the energy is shifted to

    x = E + s*M - C        (s = +1 spin, s = -1 pseudospin)

so the root finding below is written once for a signed mass. The explicit
energy equations of each limit are kept as separate functions; they serve
as the bisection target that confirms every closed-form root and as the two
sides of the spin to pseudospin map check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from scipy.optimize import bisect

from .model import PotentialParams, QuantumNumbers, SymmetryMode, exponents
from .nu_engine import NuProblem

__all__ = [
    "NoBoundState",
    "StateStatus",
    "BoundState",
    "EquationInputs",
    "equation_inputs",
    "spin_residual",
    "pseudospin_residual",
    "apply_symmetry_map",
    "apply_reflection_map",
    "lambda_of_E",
    "lambda_from_q0",
    "solve_energy",
    "solve_spin_energy",
    "solve_pseudospin_energy",
    "confirm_by_bisection",
    "enumerate_levels",
    "nu_problem",
    "nu_root_signs",
    "n_max",
    "n_max_nonrelativistic",
    "nonrelativistic_energy",
    "coulomb_limit_energy",
    "klein_gordon_limit_residual",
]

BISECTION_AGREEMENT = 1e-10


class NoBoundState(ValueError):
    """No admissible level exists for the requested quantum numbers."""


class StateStatus(str, enum.Enum):
    """How a returned level relates to a normalisable solution.

    BOUND: positive decay constant and a small-r exponent of at least 1/2,
    so the closed-form spinor vanishes at the origin.
    IRREGULAR: the energy solves the equation but the exponent is below 1/2;
    the closed form is the solution that does not vanish at the origin.
    MIRROR: the principal combination is negative; the energy is the one of
    the partner with the same absolute value, an artefact of squaring.
    """

    BOUND = "bound"
    IRREGULAR = "irregular"
    MIRROR = "mirror"


def _mass_sign(mode: SymmetryMode) -> float:
    return 1.0 if mode is SymmetryMode.SPIN else -1.0


@dataclass(frozen=True)
class BoundState:
    """A solved level with the quantities that define its closed-form spinor."""

    E: float
    lam: float
    exponent: float
    A: float
    mode: SymmetryMode
    qn: QuantumNumbers
    params: PotentialParams
    d0: float
    status: StateStatus = StateStatus.BOUND
    alternate_E: float | None = None

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"decay constant must be positive, got {self.lam!r}")
        s = _mass_sign(self.mode)
        lo, hi = self.params.C - s * self.params.M, s * self.params.M
        if not lo < self.E < hi:
            raise ValueError(f"energy {self.E!r} outside the admissible window ({lo}, {hi})")

    @property
    def n(self) -> int:
        return self.qn.n

    @property
    def kappa(self) -> int:
        return self.qn.kappa

    @property
    def gamma(self) -> float:
        return self.exponent * (self.exponent - 1.0)

    @property
    def shifted_energy(self) -> float:
        """x = E + s*M - C, positive for every admissible level."""
        return self.E + _mass_sign(self.mode) * self.params.M - self.params.C

    @property
    def beta(self) -> float:
        p = self.params
        return p.r0 * p.r0 * self.shifted_energy * p.V0

    @property
    def scaled_energy(self) -> float:
        """r0^2 (E - s*M)(E + s*M - C)."""
        p = self.params
        return p.r0 * p.r0 * (self.E - _mass_sign(self.mode) * p.M) * self.shifted_energy

    @property
    def ambiguous(self) -> bool:
        return self.alternate_E is not None

    @property
    def regular_n(self) -> int | None:
        """Node count of the solution that is regular at the origin, if any.

        Equals n for BOUND levels. For IRREGULAR levels the same energy belongs
        to the regular solution with n + 2*exponent - 1 nodes when that is a
        non-negative integer.
        """
        if self.status is StateStatus.BOUND:
            return self.n
        if self.status is StateStatus.IRREGULAR:
            m = self.n + 2.0 * self.exponent - 1.0
            if m >= 0 and abs(m - round(m)) < 1e-12:
                return int(round(m))
        return None

    def label(self) -> str:
        return self.qn.label(self.mode)


# --- explicit energy equations ----------------------------------------------

@dataclass(frozen=True)
class EquationInputs:
    """Inputs of an energy equation: mass, constant, well, exponent, level, d0."""

    M: float
    C: float
    V0: float
    r0: float
    exponent: float
    n: int
    d0: float


def equation_inputs(p: PotentialParams, q: QuantumNumbers, d0: float,
                    mode: SymmetryMode | str) -> EquationInputs:
    mode = SymmetryMode.parse(mode)
    return EquationInputs(p.M, p.C, p.V0, p.r0, exponents(q, p.H, mode), q.n, d0)


def spin_residual(E: float, x: EquationInputs) -> float:
    """Spin energy equation written as left side minus right side.

    (E - M)(E + M - C) - d0 eta (eta - 1)/r0^2
        + [r0 (E + M - C) V0 / A - A / r0]^2 / 4,   A = n + eta.
    """
    eta = x.exponent
    A = x.n + eta
    if A == 0:
        raise NoBoundState("no bound state (A = 0)")
    bracket = x.r0 * (E + x.M - x.C) * x.V0 / A - A / x.r0
    return (E - x.M) * (E + x.M - x.C) - x.d0 * (eta - 1.0) * eta / x.r0 ** 2 + 0.25 * bracket * bracket


def pseudospin_residual(E: float, x: EquationInputs) -> float:
    """Pseudospin energy equation written as left side minus right side.

    (E + M)(E - M - C) - d0 Lam (Lam - 1)/r0^2
        + [r0 (E - M - C) V0 / A - A / r0]^2 / 4,   A = n + Lam.
    """
    lam_exp = x.exponent
    A = x.n + lam_exp
    if A == 0:
        raise NoBoundState("no bound state (A = 0)")
    bracket = x.r0 * (E - x.M - x.C) * x.V0 / A - A / x.r0
    return ((E + x.M) * (E - x.M - x.C) - x.d0 * lam_exp * (lam_exp - 1.0) / x.r0 ** 2
            + 0.25 * bracket * bracket)


def apply_symmetry_map(spin: EquationInputs, C_pseudo: float | None = None) -> EquationInputs:
    """Send spin-equation inputs to the ones that reproduce the pseudospin equation.

    M goes to -M, the spin constant is replaced by the pseudospin constant
    (``C_pseudo``, default: keep the number), and the exponent kappa + H + 1
    drops to kappa + H.
    """
    C = spin.C if C_pseudo is None else C_pseudo
    return replace(spin, M=-spin.M, C=C, exponent=spin.exponent - 1.0)


def apply_reflection_map(E: float, x: EquationInputs) -> tuple[float, EquationInputs]:
    """The alternative map E -> -E, C -> -C, V0 -> -V0 (an involution)."""
    return -E, replace(x, C=-x.C, V0=-x.V0)


# --- decay constant ---------------------------------------------------------

def _principal(q: QuantumNumbers, H: float, mode: SymmetryMode) -> tuple[float, float]:
    eta = exponents(q, H, mode)
    return eta, q.n + eta


def lambda_of_E(E: float, p: PotentialParams, q: QuantumNumbers,
                mode: SymmetryMode | str = SymmetryMode.SPIN) -> float:
    """Signed decay constant (beta - A^2)/(2A) at energy ``E``."""
    mode = SymmetryMode.parse(mode)
    _, A = _principal(q, p.H, mode)
    if A == 0:
        raise NoBoundState(f"no bound state at (n={q.n}, kappa={q.kappa}, H={p.H}) (A = 0)")
    beta = p.r0 * p.r0 * (E + _mass_sign(mode) * p.M - p.C) * p.V0
    return (beta - A * A) / (2.0 * A)


def lambda_from_q0(E: float, p: PotentialParams, q: QuantumNumbers, d0: float,
                   mode: SymmetryMode | str = SymmetryMode.SPIN) -> float:
    """sqrt(gamma d0 - scaled energy); NaN when the radicand is negative."""
    mode = SymmetryMode.parse(mode)
    s = _mass_sign(mode)
    eta = exponents(q, p.H, mode)
    rad = eta * (eta - 1.0) * d0 - p.r0 ** 2 * (E - s * p.M) * (E + s * p.M - p.C)
    return math.sqrt(rad) if rad >= 0 else math.nan


# --- closed-form solve ------------------------------------------------------

def _quadratic_roots(a: float, b: float, c: float) -> tuple[float, float] | None:
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    t = -0.5 * (b + math.copysign(sq, b))
    if t == 0.0:
        return (0.0, 0.0)
    r1, r2 = t / a, c / t
    return (min(r1, r2), max(r1, r2))


def _energy_window(p: PotentialParams, mode: SymmetryMode) -> tuple[float, float]:
    s = _mass_sign(mode)
    return p.C - s * p.M, s * p.M


def solve_energy(p: PotentialParams, q: QuantumNumbers, d0: float,
                 mode: SymmetryMode | str = SymmetryMode.SPIN,
                 include_mirror: bool = True, confirm: bool = True) -> BoundState:
    """Closed-form level for either limit.

    In terms of x = E + s*M - C the energy equation is the quadratic

        (1 + a^2/4) x^2 - (D + V0/2) x + (b^2/4 - g) = 0

    with a = r0 V0/A, b = A/r0, g = gamma d0/r0^2 and D = 2 s M - C. A root is
    admissible when it lies inside the energy window and gives a positive
    decay constant. Levels with A < 0 are returned as MIRROR states when
    ``include_mirror`` is set. With ``confirm`` the chosen root is re-found by
    bisection on the explicit energy equation.
    """
    mode = SymmetryMode.parse(mode)
    d0 = float(d0)
    if d0 < 0:
        raise ValueError(f"d0 must be non-negative, got {d0!r}")
    s = _mass_sign(mode)
    eta, A = _principal(q, p.H, mode)
    if A == 0:
        raise NoBoundState(f"no bound state (A = 0) for n={q.n}, kappa={q.kappa}, H={p.H}")
    if A < 0 and not include_mirror:
        raise NoBoundState(f"no bound state (A = {A:g} < 0) for n={q.n}, kappa={q.kappa}, H={p.H}")
    absA = abs(A)
    r0, V0 = p.r0, p.V0
    D = 2.0 * s * p.M - p.C
    a = r0 * V0 / absA
    b = absA / r0
    g = eta * (eta - 1.0) * d0 / (r0 * r0)
    roots = _quadratic_roots(1.0 + 0.25 * a * a, -(D + 0.5 * V0), 0.25 * b * b - g)
    if roots is None:
        raise NoBoundState(f"no bound state (complex roots) for n={q.n}, kappa={q.kappa}, H={p.H}")
    admissible = []
    for x in roots:
        lam = (r0 * r0 * V0 * x - absA * absA) / (2.0 * absA)
        if lam > 0 and 0.0 < x < D:
            admissible.append((x, lam))
    if not admissible:
        raise NoBoundState(f"no bound state (no admissible root) for n={q.n}, kappa={q.kappa}, H={p.H}")
    # the lower energy first; a second survivor is reported, not discarded
    admissible.sort()
    x, lam = admissible[0]
    alternate = admissible[1][0] - s * p.M + p.C if len(admissible) > 1 else None
    E = x - s * p.M + p.C
    if A < 0:
        status = StateStatus.MIRROR
    elif eta < 0.5:
        status = StateStatus.IRREGULAR
    else:
        status = StateStatus.BOUND
    state = BoundState(E=E, lam=lam, exponent=eta, A=A, mode=mode, qn=q, params=p,
                       d0=d0, status=status, alternate_E=alternate)
    if confirm:
        Eb = confirm_by_bisection(state)
        if abs(Eb - E) > BISECTION_AGREEMENT:
            raise ArithmeticError(
                f"closed-form root {E!r} and bisection root {Eb!r} disagree for {state.label()}"
            )
    return state


def solve_spin_energy(p: PotentialParams, q: QuantumNumbers, d0: float = 0.0, **kw) -> BoundState:
    """Level of the spin limit (upper component bound by the Hulthen well)."""
    return solve_energy(p, q, d0, SymmetryMode.SPIN, **kw)


def solve_pseudospin_energy(p: PotentialParams, q: QuantumNumbers, d0: float = 0.0, **kw) -> BoundState:
    """Level of the pseudospin limit (lower component bound by the Hulthen well)."""
    return solve_energy(p, q, d0, SymmetryMode.PSEUDOSPIN, **kw)


def confirm_by_bisection(state: BoundState, xtol: float = 1e-14) -> float:
    """Re-find ``state.E`` by bisection on the explicit energy equation.

    The equation is an upward parabola in E, so its vertex splits the energy
    window into two pieces that each hold at most one root.
    """
    p, mode = state.params, state.mode
    s = _mass_sign(mode)
    inputs = EquationInputs(p.M, p.C, p.V0, p.r0, state.exponent, state.n, state.d0)
    if state.A < 0:
        # the mirror level solves the equation of the partner with |A|
        inputs = replace(inputs, n=0, exponent=abs(state.A))
        g_shift = state.d0 * (state.gamma - abs(state.A) * (abs(state.A) - 1.0)) / p.r0 ** 2
    else:
        g_shift = 0.0
    residual = spin_residual if mode is SymmetryMode.SPIN else pseudospin_residual

    def f(E: float) -> float:
        return residual(E, inputs) - g_shift

    lo, hi = _energy_window(p, mode)
    eps = 1e-9 * p.M
    absA = abs(state.A)
    a = p.r0 * p.V0 / absA
    vertex_x = (2.0 * s * p.M - p.C + 0.5 * p.V0) / (2.0 * (1.0 + 0.25 * a * a))
    vertex = vertex_x - s * p.M + p.C
    if state.E >= vertex:
        a_, b_ = max(vertex, lo + eps), hi - eps
    else:
        a_, b_ = lo + eps, min(vertex, hi - eps)
    if f(a_) * f(b_) > 0:
        # the root sits within eps of the window edge; widen to the edge itself
        a_, b_ = (max(vertex, lo), hi) if state.E >= vertex else (lo, min(vertex, hi))
    return bisect(f, a_, b_, xtol=xtol, maxiter=400)


def enumerate_levels(p: PotentialParams, kappa: int, d0: float,
                     mode: SymmetryMode | str = SymmetryMode.SPIN,
                     n_limit: int = 200, include_mirror: bool = False) -> list[BoundState]:
    """All admissible levels of one kappa, ordered by n.

    Every returned level satisfies n <= n_max evaluated at its own energy.
    """
    mode = SymmetryMode.parse(mode)
    out: list[BoundState] = []
    started = False
    for n in range(n_limit + 1):
        q = QuantumNumbers(n, kappa)
        try:
            st = solve_energy(p, q, d0, mode, include_mirror=include_mirror)
        except NoBoundState:
            if started and exponents(q, p.H, mode) + n > 0:
                break
            continue
        started = True
        if st.status is not StateStatus.MIRROR and n > n_max(p, q, st.E, mode):
            raise ArithmeticError(f"level {st.label()} violates n <= n_max at its own energy")
        out.append(st)
    return out


# --- NU specialisation ------------------------------------------------------

def nu_problem(E: float, p: PotentialParams, q: QuantumNumbers, d0: float,
               mode: SymmetryMode | str = SymmetryMode.SPIN) -> NuProblem:
    """The z = exp(-r/r0) form of the radial equation at energy E.

    c1 = c2 = c3 = 1 and
    q2 = beta + gamma d0 - eps, q1 = beta + 2 gamma d0 - gamma - 2 eps, q0 = gamma d0 - eps,
    with eps the scaled energy r0^2 (E - s M)(E + s M - C).
    """
    mode = SymmetryMode.parse(mode)
    s = _mass_sign(mode)
    eta = exponents(q, p.H, mode)
    gamma = eta * (eta - 1.0)
    x = E + s * p.M - p.C
    beta = p.r0 ** 2 * x * p.V0
    eps = p.r0 ** 2 * (E - s * p.M) * x
    return NuProblem(1.0, 1.0, 1.0,
                     q0=gamma * d0 - eps,
                     q1=beta + 2.0 * gamma * d0 - gamma - 2.0 * eps,
                     q2=beta + gamma * d0 - eps)


def nu_root_signs(state: BoundState) -> tuple[int, int]:
    """Branch of (sqrt(c8), sqrt(c9)) that matches this level.

    sqrt(c8) carries the sign of the decay constant in the original labelling
    (negative for mirror levels) and sqrt(c9) the sign of exponent - 1/2.
    """
    s8 = -1 if state.A < 0 else 1
    s9 = 1 if state.exponent >= 0.5 else -1
    return s8, s9


# --- level counting and limits ----------------------------------------------

def n_max(p: PotentialParams, q: QuantumNumbers, E: float,
          mode: SymmetryMode | str = SymmetryMode.SPIN) -> int:
    """Largest n strictly below r0 sqrt(V0 x) - exponent; -1 when none exists."""
    mode = SymmetryMode.parse(mode)
    x = E + _mass_sign(mode) * p.M - p.C
    rad = p.V0 * x
    if rad < 0:
        return -1
    bound = p.r0 * math.sqrt(rad) - exponents(q, p.H, mode)
    return max(math.ceil(bound) - 1, -1)


def n_max_nonrelativistic(mu: float, V0: float, r0: float, l: int) -> int:
    """Largest n strictly below r0 sqrt(2 mu V0) - l - 1; -1 when none exists."""
    bound = r0 * math.sqrt(2.0 * mu * V0) - l - 1
    return max(math.ceil(bound) - 1, -1)


def nonrelativistic_energy(mu: float, Ze2: float, delta: float, n: int, l: int,
                           H: float = 0.0, d0: float = 0.0) -> float:
    """Schrodinger level of the Hulthen well with the Coulomb-like tensor term.

    delta^2/(2 mu) { (H+l)(H+l+1) d0 - [mu Ze2/(delta N) - N/2]^2 },  N = n + l + H + 1.
    """
    N = n + l + H + 1.0
    if N == 0 or delta == 0 or mu == 0:
        raise ValueError("zero denominator in the nonrelativistic level formula")
    inner = mu * Ze2 / (delta * N) - 0.5 * N
    return delta * delta / (2.0 * mu) * ((H + l) * (H + l + 1.0) * d0 - inner * inner)


def coulomb_limit_energy(mu: float, Ze2: float, n: int, l: int, M: float | None = None) -> float:
    """Hydrogen-like limit -(mu Ze2)^2 / (2 M (n + l + 1)^2) of the screened level."""
    M = mu if M is None else M
    return -(mu * Ze2) ** 2 / (2.0 * M * (n + l + 1.0) ** 2)


def klein_gordon_limit_residual(E: float, Ze2: float, delta: float, n: int, l: int, M: float) -> float:
    """sqrt(M^2 - E^2) - [Ze2 (E + M)/(2 N) - N delta / 2] with N = n + l + 1."""
    if abs(E) >= M:
        raise ValueError(f"|E| must be below M (E={E!r}, M={M!r})")
    N = n + l + 1.0
    return math.sqrt(M * M - E * E) - (Ze2 * (E + M) / (2.0 * N) - 0.5 * N * delta)
