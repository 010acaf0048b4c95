"""Self-checks behind the ``verify`` and ``table`` commands.

Each check returns a :class:`CheckResult` whose ``details`` are plain JSON
values, so a report can be dumped as is.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .model import PotentialParams, QuantumNumbers, SymmetryMode
from .oracle import Grid, OracleDivergence, solve_level
from .spectrum import (
    NoBoundState,
    StateStatus,
    coulomb_limit_energy,
    equation_inputs,
    klein_gordon_limit_residual,
    nonrelativistic_energy,
    pseudospin_residual,
    solve_energy,
    spin_residual,
    apply_symmetry_map,
)

__all__ = [
    "CheckResult",
    "TableCell",
    "reference_tables",
    "regenerate_table",
    "check_table",
    "check_oracle",
    "check_map",
    "check_coulomb_limit",
    "check_klein_gordon",
    "check_nonrelativistic",
    "CHECKS",
    "run_checks",
]

TABLE_TOLERANCE = 1e-6
TABLE_QUOTA = 0.9
ORACLE_TOLERANCE = 1e-5


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "summary": self.summary,
                "details": self.details}


def reference_tables() -> dict:
    """The published energy tables shipped with the package (null = no entry)."""
    text = resources.files("hulthen_dirac").joinpath("data/reference_tables.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class TableCell:
    """One (n, kappa, H) entry: published value next to the regenerated one."""

    n: int
    kappa: int
    H: float
    reference: float | None
    energy: float | None
    status: str
    label: str
    lam: float | None = None
    exponent: float | None = None
    reason: str = ""

    @property
    def l(self) -> int:
        return QuantumNumbers(self.n, self.kappa).l

    @property
    def diff(self) -> float | None:
        if self.reference is None or self.energy is None:
            return None
        return self.energy - self.reference

    @property
    def matches(self) -> bool:
        if self.reference is None:
            return self.energy is None
        return self.energy is not None and abs(self.energy - self.reference) <= TABLE_TOLERANCE


def table_params(table_id: str) -> tuple[PotentialParams, float]:
    data = reference_tables()
    if table_id not in ("table2", "table3"):
        raise ValueError(f"unknown table {table_id!r}; expected table2 or table3")
    P = data["params"]
    return PotentialParams(P["M"], P["r0"], P["V0"], P["C"]), data[table_id]["d0"]


def regenerate_table(table_id: str) -> list[TableCell]:
    """Solve every cell of a published table, sorted by (n, kappa, H)."""
    base, d0 = table_params(table_id)
    cells = []
    for row in reference_tables()[table_id]["rows"]:
        q = QuantumNumbers(row["n"], row["kappa"])
        p = base.replace(H=row["H"])
        try:
            st = solve_energy(p, q, d0)
        except NoBoundState as exc:
            cells.append(TableCell(q.n, q.kappa, p.H, row["E"], None, "none", q.label(), reason=str(exc)))
            continue
        cells.append(TableCell(q.n, q.kappa, p.H, row["E"], st.E, st.status.value, q.label(),
                               lam=st.lam, exponent=st.exponent))
    cells.sort(key=lambda c: (c.n, c.kappa, c.H))
    return cells


def _oracle_energy(table_id: str, cell: TableCell, points: int = 4000) -> float | None:
    base, d0 = table_params(table_id)
    p = base.replace(H=cell.H)
    try:
        return solve_level(p, QuantumNumbers(cell.n, cell.kappa), d0, g=Grid.for_params(p, points)).E
    except OracleDivergence:
        return None


def check_table(table_id: str, adjudicate: bool = True) -> CheckResult:
    """Regenerate a table; pass when the quota of cells match and every blank stays blank.

    Mismatched BOUND cells are re-solved by the finite-difference oracle so the
    report shows which side it supports.
    """
    cells = regenerate_table(table_id)
    matched = sum(c.matches for c in cells)
    blanks = [c for c in cells if c.reference is None]
    blanks_ok = all(c.energy is None for c in blanks)
    outliers = []
    for c in cells:
        if c.matches:
            continue
        entry = {"n": c.n, "kappa": c.kappa, "H": c.H, "label": c.label, "status": c.status,
                 "reference": c.reference, "energy": c.energy, "diff": c.diff}
        if adjudicate and c.status == StateStatus.BOUND.value:
            entry["oracle"] = _oracle_energy(table_id, c)
        outliers.append(entry)
    fraction = matched / len(cells)
    passed = fraction >= TABLE_QUOTA and blanks_ok
    summary = (f"{matched}/{len(cells)} cells within {TABLE_TOLERANCE:g} "
               f"({100 * fraction:.1f}%, quota {100 * TABLE_QUOTA:.0f}%); "
               f"blank cells reproduced {sum(c.energy is None for c in blanks)}/{len(blanks)}")
    return CheckResult(f"{table_id}", passed, summary,
                       {"matched": matched, "cells": len(cells), "outliers": outliers})


def check_oracle(table_ids: tuple[str, ...] = ("table2",), points: int = 4000,
                 tol: float = ORACLE_TOLERANCE) -> CheckResult:
    """Closed-form BOUND energies against the finite-difference oracle."""
    rows = []
    for table_id in table_ids:
        base, d0 = table_params(table_id)
        for c in regenerate_table(table_id):
            if c.status != StateStatus.BOUND.value:
                continue
            p = base.replace(H=c.H)
            q = QuantumNumbers(c.n, c.kappa)
            try:
                lvl = solve_level(p, q, d0, g=Grid.for_params(p, points), seed=c.energy)
            except OracleDivergence as exc:
                rows.append({"table": table_id, "label": c.label, "n": c.n, "kappa": c.kappa,
                             "H": c.H, "passed": False, "error": str(exc)})
                continue
            rel = abs(lvl.E - c.energy) / abs(c.energy)
            rows.append({"table": table_id, "label": c.label, "n": c.n, "kappa": c.kappa, "H": c.H,
                         "closed_form": c.energy, "oracle": lvl.E, "relative_difference": rel,
                         "nodes": lvl.nodes, "passed": rel <= tol and lvl.nodes == c.n})
    passed = all(r["passed"] for r in rows) and bool(rows)
    worst = max((r.get("relative_difference", math.inf) for r in rows), default=math.nan)
    return CheckResult("oracle", passed,
                       f"{sum(r['passed'] for r in rows)}/{len(rows)} bound rows within {tol:g} "
                       f"(worst {worst:.3g})", {"rows": rows})


def check_map(samples: int = 20, seed: int = 66, tol: float = 1e-12) -> CheckResult:
    """The spin equation under (M -> -M, C -> C_ps, exponent -> exponent - 1) equals the pseudospin one."""
    rng = np.random.default_rng(seed)
    cases = [
        (PotentialParams(10.0, 10.0, 10.0, 10.1, 0.0), -30.1, QuantumNumbers(2, -1), 0.0),
        (PotentialParams(10.0, 10.0, 10.0, 10.1, 0.5), -30.1, QuantumNumbers(2, 2), 0.0823058167837972),
        (PotentialParams(5.0, 3.0, 2.0, 1.0, 0.3), -12.0, QuantumNumbers(0, 3), 1.0 / 12.0),
    ]
    worst = 0.0
    for p, c_ps, q, d0 in cases:
        spin_inputs = equation_inputs(p, q, d0, SymmetryMode.SPIN)
        mapped = apply_symmetry_map(spin_inputs, c_ps)
        target = equation_inputs(p.replace(C=c_ps), q, d0, SymmetryMode.PSEUDOSPIN)
        for E in rng.uniform(-2.0 * p.M, 2.0 * p.M, samples):
            a, b = spin_residual(E, mapped), pseudospin_residual(E, target)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return CheckResult("map", worst <= tol, f"worst relative residual gap {worst:.3g} (tol {tol:g})",
                       {"samples_per_case": samples, "cases": len(cases), "worst": worst})


def check_coulomb_limit(deltas=(1e-1, 1e-2, 1e-3, 1e-4), tol: float = 1e-4) -> CheckResult:
    """Screened level at mu = M = Ze2 = 1, n = l = 0 approaches -1/2 monotonically."""
    target = coulomb_limit_energy(1.0, 1.0, 0, 0)
    gaps = [abs(nonrelativistic_energy(1.0, 1.0, d, 0, 0) - target) for d in deltas]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    passed = monotone and gaps[-1] <= tol
    return CheckResult("coulomb-limit", passed,
                       f"gap {gaps[-1]:.3g} at delta={deltas[-1]:g}; monotone={monotone}",
                       {"target": target, "deltas": list(deltas), "gaps": gaps})


def check_klein_gordon(tol: float = 1e-8) -> CheckResult:
    """At H = d0 = C = 0 and V0 = Ze2 * delta the level obeys the scalar-limit relation."""
    M, r0, Ze2 = 1.0, 10.0, 0.5
    p = PotentialParams(M, r0, Ze2 / r0, 0.0, 0.0)
    worst, rows = 0.0, []
    for l in (1, 2):
        for n in range(3):
            try:
                st = solve_energy(p, QuantumNumbers(n, l), 0.0)
            except NoBoundState:
                continue
            res = klein_gordon_limit_residual(st.E, Ze2, p.delta, n, l, M)
            worst = max(worst, abs(res))
            rows.append({"n": n, "l": l, "energy": st.E, "residual": res})
    return CheckResult("klein-gordon", bool(rows) and worst <= tol,
                       f"worst residual {worst:.3g} over {len(rows)} levels", {"rows": rows})


def check_nonrelativistic(masses=(1e2, 1e3, 1e4), coupling: float = 50.0) -> CheckResult:
    """E - M tends to the Schrodinger level as M grows at fixed 2 M V0 r0^2."""
    r0 = 1.0
    rows = []
    for M in masses:
        V0 = coupling / (2.0 * M * r0 * r0)
        p = PotentialParams(M, r0, V0, 0.0, 0.0)
        st = solve_energy(p, QuantumNumbers(0, 1), 0.0)
        nr = nonrelativistic_energy(M, V0 * r0, 1.0 / r0, 0, 1)
        rows.append({"M": M, "V0": V0, "binding": st.E - M, "schrodinger": nr,
                     "relative_gap": abs((st.E - M) - nr) / abs(nr)})
    gaps = [r["relative_gap"] for r in rows]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    return CheckResult("nonrelativistic", monotone,
                       f"relative gaps {', '.join(f'{g:.3g}' for g in gaps)}", {"rows": rows})


CHECKS = {
    "oracle": lambda: check_oracle(("table2",)),
    "oracle-all": lambda: check_oracle(("table2", "table3")),
    "table2": lambda: check_table("table2"),
    "table3": lambda: check_table("table3"),
    "map": check_map,
    "coulomb-limit": check_coulomb_limit,
    "klein-gordon": check_klein_gordon,
    "nonrelativistic": check_nonrelativistic,
}


def run_checks(names) -> list[CheckResult]:
    out = []
    for name in names:
        if name not in CHECKS:
            raise KeyError(name)
        out.append(CHECKS[name]())
    return out
