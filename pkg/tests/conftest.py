from __future__ import annotations

import functools

import pytest
from hypothesis import HealthCheck, settings

from hulthen_dirac.model import QuantumNumbers
from hulthen_dirac.spectrum import NoBoundState, StateStatus, solve_energy
from hulthen_dirac.verify import reference_tables, table_params

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@functools.lru_cache(maxsize=None)
def table_states(table_id: str):
    """(row, params, quantum numbers, d0, state or None) for every published cell."""
    base, d0 = table_params(table_id)
    out = []
    for row in reference_tables()[table_id]["rows"]:
        p = base.replace(H=row["H"])
        q = QuantumNumbers(row["n"], row["kappa"])
        try:
            st = solve_energy(p, q, d0)
        except NoBoundState:
            st = None
        out.append((row, p, q, d0, st))
    return tuple(out)


def bound_rows(table_id: str):
    return [r for r in table_states(table_id) if r[4] is not None and r[4].status is StateStatus.BOUND]


def row_id(entry) -> str:
    row = entry[0]
    return f"n{row['n']}k{row['kappa']}H{row['H']}"


# lines printed at the end of the run by the acceptance suite
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_report():
    return ACCEPTANCE_LINES
