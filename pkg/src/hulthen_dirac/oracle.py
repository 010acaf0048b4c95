"""Finite-difference eigenvalue solver for the reduced radial equation.

The second-order equation for the bound component,

    F'' = [W(r; E) - eps(E)] F,
    W   = [gamma (d0 + u + u^2) - beta(E) u] / r0^2,     u = 1/(exp(r/r0) - 1),

is discretised with no reference to the closed-form solution. The energy
appears both in eps and in beta, so a level is a root in E of mu_n(E), the
n-th eigenvalue of the discrete operator at fixed E.

Mesh: the radial coordinate is mapped to t = ln(r/(r+c)) + ln(r+a), which is
logarithmic both near the origin and far out and roughly uniform in between,
and t is sampled with a uniform step h. A Liouville change of variable
F = sqrt(dr/dt) y keeps the operator symmetric tridiagonal:

    -y'' + [(dr/dt)^2 (W - eps) - S/2] y = 0,

with S the Schwarzian of r(t). The outer edge is a Dirichlet wall; the
inner edge uses the two-term Frobenius behaviour r^s (1 + a1 r) so that
exponents near s = 1/2 do not spoil second-order convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .model import PotentialParams, QuantumNumbers, SymmetryMode, exponents

__all__ = [
    "OracleDivergence",
    "Grid",
    "DiscreteOperator",
    "OracleLevel",
    "OracleResult",
    "discretize",
    "sturm_count",
    "sturm_eigenvalue",
    "solve_level",
    "oracle_spectrum",
]

MAX_ITERATIONS = 200


class OracleDivergence(RuntimeError):
    """The outer energy iteration failed to settle."""


@dataclass(frozen=True)
class Grid:
    """Radial mesh specification.

    ``mapping="stretched"`` samples t = ln(r/(r+core)) + ln(r+knee) uniformly;
    ``mapping="uniform"`` samples r itself uniformly. ``points`` counts both
    end points.
    """

    r_min: float = 1e-4
    r_max: float = 400.0
    points: int = 4000
    mapping: str = "stretched"
    core: float = 1e-3
    knee: float = 0.25

    def __post_init__(self) -> None:
        if not self.r_min > 0:
            raise ValueError(f"r_min must be positive, got {self.r_min!r}")
        if not self.r_max > self.r_min:
            raise ValueError("r_max must exceed r_min")
        if int(self.points) != self.points or self.points < 500:
            raise ValueError(f"points must be an integer >= 500, got {self.points!r}")
        if self.mapping not in ("stretched", "uniform"):
            raise ValueError(f"unknown mapping {self.mapping!r}")
        if not (self.core > 0 and self.knee > 0):
            raise ValueError("core and knee lengths must be positive")

    @classmethod
    def for_params(cls, p: PotentialParams, points: int = 4000, r_min: float = 1e-4,
                   extent: float = 40.0, mapping: str = "stretched") -> "Grid":
        """Mesh out to ``extent`` ranges with core r0/10^4 and knee r0/40."""
        return cls(r_min=r_min, r_max=extent * p.r0, points=points, mapping=mapping,
                   core=p.r0 * 1e-4, knee=p.r0 / 40.0)

    def refined(self, factor: int = 2) -> "Grid":
        """Same mesh with the step in t divided by ``factor``."""
        return Grid(self.r_min, self.r_max, (self.points - 1) * factor + 1,
                    self.mapping, self.core, self.knee)

    # mapping and its derivatives ------------------------------------------
    def t_of_r(self, r):
        r = np.asarray(r, dtype=float)
        if self.mapping == "uniform":
            return r
        return np.log(r / (r + self.core)) + np.log(r + self.knee)

    def r_of_t(self, t):
        t = np.asarray(t, dtype=float)
        if self.mapping == "uniform":
            return t
        a, c = self.knee, self.core
        et = np.exp(t)
        # positive root of r^2 + (a - e^t) r - c e^t = 0
        return 0.5 * ((et - a) + np.sqrt((a - et) ** 2 + 4.0 * c * et))

    def dt_dr(self, r):
        r = np.asarray(r, dtype=float)
        if self.mapping == "uniform":
            return np.ones_like(r)
        return 1.0 / r - 1.0 / (r + self.core) + 1.0 / (r + self.knee)

    def _schwarzian(self, r: np.ndarray) -> np.ndarray:
        # Schwarzian derivative of r(t), written through tau = dt/dr
        if self.mapping == "uniform":
            return np.zeros_like(r)
        a, c = self.knee, self.core
        tau = self.dt_dr(r)
        tau_r = -1.0 / r ** 2 + 1.0 / (r + c) ** 2 - 1.0 / (r + a) ** 2
        tau_rr = 2.0 / r ** 3 - 2.0 / (r + c) ** 3 + 2.0 / (r + a) ** 3
        return -tau_rr / tau ** 3 + 1.5 * tau_r ** 2 / tau ** 4

    def nodes(self) -> tuple[np.ndarray, float]:
        """All mesh radii (end points included) and the step in t."""
        t = np.linspace(float(self.t_of_r(self.r_min)), float(self.t_of_r(self.r_max)), self.points)
        r = self.r_of_t(t)
        r[0], r[-1] = self.r_min, self.r_max
        return r, t[1] - t[0]


def _mass_sign(mode: SymmetryMode) -> float:
    return 1.0 if mode is SymmetryMode.SPIN else -1.0


@dataclass
class DiscreteOperator:
    """Energy-dependent symmetric tridiagonal operator on the interior nodes."""

    params: PotentialParams
    qn: QuantumNumbers
    d0: float
    mode: SymmetryMode
    grid: Grid
    centrifugal: str
    r: np.ndarray = field(repr=False)          # all nodes
    h: float = 0.0
    _r2p: np.ndarray = field(repr=False, default=None)      # (dr/dt)^2 on interior
    _cent: np.ndarray = field(repr=False, default=None)     # gamma * (approx) 1/r^2
    _u: np.ndarray = field(repr=False, default=None)
    _schw: np.ndarray = field(repr=False, default=None)

    @property
    def interior(self) -> np.ndarray:
        return self.r[1:-1]

    @property
    def rounding_floor(self) -> float:
        """Rounding level of a computed eigenvalue, about 16 eps ||T||."""
        return 64.0 * np.finfo(float).eps / (self.h * self.h)

    @property
    def gamma(self) -> float:
        eta = exponents(self.qn, self.params.H, self.mode)
        return eta * (eta - 1.0)

    def shifted(self, E: float) -> float:
        return E + _mass_sign(self.mode) * self.params.M - self.params.C

    def energy_term(self, E: float) -> float:
        """eps(E) = (E - s M)(E + s M - C), in fm^-2."""
        return (E - _mass_sign(self.mode) * self.params.M) * self.shifted(E)

    def _inner_ratio(self, E: float) -> float:
        # y(r0)/y(r1) from F ~ r^s (1 + a1 r) and y = F sqrt(dt/dr)
        p = self.params
        gam = self.gamma
        s = 0.5 + math.sqrt(max(0.25 + gam, 0.0))
        beta = p.r0 ** 2 * self.shifted(E) * p.V0
        a1 = -(beta / p.r0) / (2.0 * s)
        r0_, r1_ = self.r[0], self.r[1]
        tau0, tau1 = self.grid.dt_dr(r0_), self.grid.dt_dr(r1_)
        f0 = r0_ ** s * (1.0 + a1 * r0_) * math.sqrt(tau0)
        f1 = r1_ ** s * (1.0 + a1 * r1_) * math.sqrt(tau1)
        return f0 / f1

    def matrices(self, E: float, include_energy: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of the operator at energy E."""
        p = self.params
        beta = p.r0 ** 2 * self.shifted(E) * p.V0
        W = self._cent - beta * self._u / p.r0 ** 2
        if include_energy:
            W = W - self.energy_term(E)
        h2 = self.h * self.h
        diag = 2.0 / h2 + self._r2p * W - 0.5 * self._schw
        diag[0] -= self._inner_ratio(E) / h2
        off = np.full(diag.size - 1, -1.0 / h2)
        return diag, off

    def mu(self, E: float, index: int, solver: str = "lapack") -> float:
        """The index-th eigenvalue (ascending, from 0) of the operator at E."""
        diag, off = self.matrices(E)
        if solver == "lapack":
            return float(eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                                          select_range=(index, index))[0])
        if solver == "sturm":
            return sturm_eigenvalue(diag, off, index)
        raise ValueError(f"unknown solver {solver!r}")

    def bound_count(self, E: float) -> int:
        """Number of levels with eps below zero when beta is frozen at beta(E).

        By inertia this equals the negative eigenvalues of the operator with
        the energy term removed.
        """
        diag, off = self.matrices(E, include_energy=False)
        return int(sturm_count(diag, off, 0.0))

    def eigenvector(self, E: float, index: int) -> np.ndarray:
        """Sampled F on all nodes, unit norm, positive just inside the origin."""
        diag, off = self.matrices(E)
        _, vec = eigh_tridiagonal(diag, off, select="i", select_range=(index, index))
        y = vec[:, 0]
        # restore the end points: Frobenius value inside, wall outside
        y_full = np.concatenate(([self._inner_ratio(E) * y[0]], y, [0.0]))
        F = y_full / np.sqrt(self.grid.dt_dr(self.r))
        # weight (dr/dt) dt = dr for the trapezoid rule in r
        drdt = 1.0 / self.grid.dt_dr(self.r)
        norm = math.sqrt(float(np.sum(F * F * drdt) * self.h))
        F = F / norm
        first = np.flatnonzero(np.abs(F) > 1e-8 * np.max(np.abs(F)))[0]
        return F if F[first] > 0 else -F


def discretize(p: PotentialParams, q: QuantumNumbers, d0: float,
               mode: SymmetryMode | str = SymmetryMode.SPIN, g: Grid | None = None,
               centrifugal: str = "approximate") -> DiscreteOperator:
    """Build the energy-dependent tridiagonal operator for one (n, kappa).

    ``centrifugal="approximate"`` uses the exponential form of 1/r^2 that the
    closed-form levels assume; ``"exact"`` keeps gamma/r^2 and serves only to
    measure how much that approximation moves a level.
    """
    mode = SymmetryMode.parse(mode)
    g = Grid.for_params(p) if g is None else g
    if centrifugal not in ("approximate", "exact"):
        raise ValueError(f"unknown centrifugal treatment {centrifugal!r}")
    r, h = g.nodes()
    ri = r[1:-1]
    eta = exponents(q, p.H, mode)
    gamma = eta * (eta - 1.0)
    u = 1.0 / np.expm1(ri / p.r0)
    if centrifugal == "approximate":
        cent = gamma * (d0 + u + u * u) / p.r0 ** 2
    else:
        cent = gamma / ri ** 2
    return DiscreteOperator(
        params=p, qn=q, d0=float(d0), mode=mode, grid=g, centrifugal=centrifugal,
        r=r, h=h, _r2p=1.0 / g.dt_dr(ri) ** 2, _cent=cent, _u=u, _schw=g._schwarzian(ri),
    )


# --- Sturm sequences --------------------------------------------------------

def sturm_count(diag, off, x) -> np.ndarray | int:
    """Number of eigenvalues strictly below ``x`` of a symmetric tridiagonal matrix.

    Uses the LDL^T pivots of (T - x I); ``x`` may be an array of shifts.
    """
    d = np.asarray(diag, dtype=float)
    e2 = np.asarray(off, dtype=float) ** 2
    x = np.asarray(x, dtype=float)
    tiny = np.finfo(float).tiny ** 0.5
    q = d[0] - x
    count = (q < 0).astype(int)
    for i in range(1, d.size):
        q = np.where(q == 0.0, -tiny, q)
        q = d[i] - x - e2[i - 1] / q
        count = count + (q < 0)
    return count if count.ndim else int(count)


def sturm_eigenvalue(diag, off, index: int, rtol: float = 4e-16, sections: int = 32) -> float:
    """The index-th eigenvalue by multisection on Sturm counts."""
    d = np.asarray(diag, dtype=float)
    e = np.abs(np.asarray(off, dtype=float))
    rad = np.zeros_like(d)
    rad[:-1] += e
    rad[1:] += e
    lo, hi = float(np.min(d - rad)), float(np.max(d + rad))
    for _ in range(200):
        if hi - lo <= rtol * max(abs(lo), abs(hi)) + 1e-300:
            break
        xs = np.linspace(lo, hi, sections + 1)[1:-1]
        c = np.asarray(sturm_count(d, e, xs))
        below = np.flatnonzero(c <= index)
        above = np.flatnonzero(c > index)
        new_lo = xs[below[-1]] if below.size else lo
        new_hi = xs[above[0]] if above.size else hi
        if new_lo == lo and new_hi == hi:
            break
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)


# --- outer energy iteration -------------------------------------------------

@dataclass(frozen=True)
class OracleLevel:
    """One converged level: energy, iterate history and sampled F."""

    E: float
    n: int
    history: tuple[float, ...]
    r: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    nodes: int
    residual: float

    @property
    def steps(self) -> np.ndarray:
        """|E_{k+1} - E_k| along the iteration."""
        return np.abs(np.diff(np.asarray(self.history)))


def _energy_window(p: PotentialParams, mode: SymmetryMode) -> tuple[float, float]:
    s = _mass_sign(mode)
    return p.C - s * p.M, s * p.M


def _secant(f, x0: float, x1: float, lo: float, hi: float, tol: float,
            floor: float) -> list[float]:
    # stops on a small step, or one step after |f| reaches the rounding level of the eigenvalue
    history = [x0, x1]
    f0, f1 = f(x0), f(x1)
    for _ in range(MAX_ITERATIONS):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not lo < x2 < hi:
            raise OracleDivergence(f"secant step left the energy window at E={x2!r}")
        history.append(x2)
        if abs(f1) <= floor or abs(x2 - x1) <= tol * max(1.0, abs(x2)):
            return history
        x0, f0, x1, f1 = x1, f1, x2, f(x2)
    else:
        raise OracleDivergence(f"no convergence after {MAX_ITERATIONS} iterations")
    return history


def _scan_bracket(op: DiscreteOperator, index: int, solver: str, samples: int = 120):
    p, mode = op.params, op.mode
    lo, hi = _energy_window(p, mode)
    span = hi - lo
    # geometric in the shifted energy, which is what controls the binding
    xs = span * np.geomspace(1e-7, 1.0 - 1e-9, samples)
    Es = lo + xs
    prev_E, prev_v = None, None
    for E in Es:
        v = op.mu(E, index, solver)
        if prev_v is not None and prev_v > 0 >= v:
            return prev_E, E
        prev_E, prev_v = E, v
    return None


def solve_level(p: PotentialParams, q: QuantumNumbers, d0: float,
                mode: SymmetryMode | str = SymmetryMode.SPIN, g: Grid | None = None,
                seed: float | None = None, solver: str = "lapack",
                centrifugal: str = "approximate", tol: float = 1e-13) -> OracleLevel:
    """Find the energy at which the n-th discrete eigenvalue crosses zero.

    With a ``seed`` the iteration is a secant sequence started at the seed
    and a point 0.1 % away from it. Without one, the energy window is scanned
    for the sign change first and the crossing is refined by Brent's method.
    """
    mode = SymmetryMode.parse(mode)
    op = discretize(p, q, d0, mode, g, centrifugal)
    index = q.n
    lo, hi = _energy_window(p, mode)
    if not lo < hi:
        raise OracleDivergence(f"empty energy window ({lo:g}, {hi:g}); nothing can bind")
    f = lambda E: op.mu(E, index, solver)  # noqa: E731
    if seed is not None:
        x1 = seed + 1e-3 * (seed - lo)
        history = _secant(f, seed, x1, lo, hi, tol, op.rounding_floor)
    else:
        bracket = _scan_bracket(op, index, solver)
        if bracket is None:
            raise OracleDivergence(f"no sign change of eigenvalue {index} inside the energy window")
        history = []

        def g_(E):
            history.append(E)
            return f(E)

        brentq(g_, *bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITERATIONS)
    E = history[-1]
    F = op.eigenvector(E, index)
    interior = F[1:-1]
    return OracleLevel(E=E, n=index, history=tuple(history), r=op.r, F=F,
                       nodes=count_sign_changes(interior), residual=abs(f(E)))


def count_sign_changes(values) -> int:
    v = np.asarray(values, dtype=float)
    scale = np.max(np.abs(v))
    s = np.sign(v[np.abs(v) > 1e-12 * scale])
    return int(np.count_nonzero(s[1:] != s[:-1]))


@dataclass(frozen=True)
class OracleResult:
    """Lowest levels of one kappa from the finite-difference solve.

    ``eigenvalues`` are energies in fm^-1 ordered by node count, which is also
    ascending order; ``scaled_energies`` gives r0^2 eps(E) for each.
    ``eigenvectors`` holds F sampled on ``r`` (unit norm, zero at the outer
    wall). ``residual_norm`` is the largest |mu_n(E_n)| over the levels.
    """

    eigenvalues: tuple[float, ...]
    scaled_energies: tuple[float, ...]
    eigenvectors: tuple[np.ndarray, ...]
    node_counts: tuple[int, ...]
    r: np.ndarray
    residual_norm: float
    levels: tuple[OracleLevel, ...]


def oracle_spectrum(p: PotentialParams, kappa: int, d0: float,
                    mode: SymmetryMode | str = SymmetryMode.SPIN, g: Grid | None = None,
                    count: int = 1, solver: str = "lapack",
                    centrifugal: str = "approximate",
                    seeds: dict[int, float] | None = None) -> OracleResult:
    """The lowest ``count`` levels n = 0..count-1 of one kappa."""
    mode = SymmetryMode.parse(mode)
    seeds = seeds or {}
    levels = []
    for n in range(count):
        lvl = solve_level(p, QuantumNumbers(n, kappa), d0, mode, g, seed=seeds.get(n),
                          solver=solver, centrifugal=centrifugal)
        levels.append(lvl)
    levels.sort(key=lambda lv: lv.E)
    r0 = p.r0
    s = _mass_sign(mode)
    scaled = tuple(r0 * r0 * (lv.E - s * p.M) * (lv.E + s * p.M - p.C) for lv in levels)
    return OracleResult(
        eigenvalues=tuple(lv.E for lv in levels), scaled_energies=scaled,
        eigenvectors=tuple(lv.F for lv in levels), node_counts=tuple(lv.nodes for lv in levels),
        r=levels[0].r if levels else np.empty(0),
        residual_norm=max((lv.residual for lv in levels), default=0.0), levels=tuple(levels),
    )
