import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from hulthen_dirac.model import PotentialParams, QuantumNumbers
from hulthen_dirac.nu_engine import (
    NoNuSolution,
    NuProblem,
    derive_constants,
    nu_energy_residual,
    nu_wavefunction,
)
from hulthen_dirac.spectrum import nu_problem, nu_root_signs, solve_energy

from conftest import bound_rows, row_id

TABLE = PotentialParams(10.0, 10.0, 10.0, 10.1)


def test_trivial_constants():
    s = derive_constants(NuProblem(1.0, 1.0, 1.0, 2.0, 1.0, 3.0))
    assert s.c4 == 0.0
    assert s.c5 == -0.5


def test_c3_must_be_nonzero():
    with pytest.raises(ValueError, match="c3"):
        NuProblem(1.0, 1.0, 0.0, 1.0, 1.0, 1.0)


def test_negative_c8_is_rejected():
    with pytest.raises(NoNuSolution, match="c8"):
        derive_constants(NuProblem(1.0, 1.0, 1.0, -1.0, 0.0, 0.0))


def test_negative_c9_is_rejected():
    # c9 = q0 - q1 + q2 + 1/4 for c1 = c2 = c3 = 1
    with pytest.raises(NoNuSolution, match="c9"):
        derive_constants(NuProblem(1.0, 1.0, 1.0, 1.0, 5.0, 1.0))


def test_root_signs_validated():
    with pytest.raises(ValueError):
        derive_constants(NuProblem(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), root_signs=(0, 1))


def test_increasing_tau_is_an_error_not_a_result():
    # c9 = 1/4 and sqrt(c8) = -3 give tau' = -2 - 2(1/2 - 3) = 3
    p = NuProblem(1.0, 1.0, 1.0, 9.0, 9.0, 0.0)
    with pytest.raises(NoNuSolution, match="tau"):
        derive_constants(p, root_signs=(-1, 1))
    s = derive_constants(p, root_signs=(-1, 1), require_decreasing_tau=False)
    assert s.tau_coeffs[1] > 0


@pytest.mark.parametrize("entry", bound_rows("table2") + bound_rows("table3"), ids=row_id)
def test_table_constants_for_hulthen_instance(entry):
    row, p, q, d0, state = entry
    s = derive_constants(nu_problem(state.E, p, q, d0))
    prob = s.problem
    eta, lam = state.exponent, state.lam
    assert (prob.c1, prob.c2, prob.c3) == (1.0, 1.0, 1.0)
    assert s.c4 == 0.0
    assert s.c5 == -0.5
    assert s.c6 == prob.q2 + 0.25
    assert s.c7 == -prob.q1
    assert s.c8 == prob.q0
    assert s.c8 == pytest.approx(lam * lam, rel=1e-9)
    assert s.c9 == pytest.approx((eta - 0.5) ** 2, rel=1e-9, abs=1e-12)
    assert s.c10 == pytest.approx(2.0 * lam, rel=1e-9)
    assert s.c11 == pytest.approx(2.0 * eta - 1.0, rel=1e-9)
    assert s.c12 == pytest.approx(lam, rel=1e-9)
    assert s.c13 == pytest.approx(eta, rel=1e-9)
    assert s.tau_coeffs[1] < 0


def test_table2_energy_zeroes_the_general_equation():
    p, q = TABLE, QuantumNumbers(1, -1)
    state = solve_energy(p, q, 0.0)
    s = derive_constants(nu_problem(0.1057848200, p, q, 0.0), nu_root_signs(state))
    assert abs(nu_energy_residual(s, 1)) <= 1e-6


def test_tuned_instance_has_zero_residual_at_ground_level():
    # c1 = c2 = c3 = 1, q0 = 4, q1 = 20 and q2 chosen so that sqrt(c9) = 1.9
    q0, q1 = 4.0, 20.0
    root9 = -(-q1 + 2.0 * q0 + math.sqrt(q0) + 0.5) / (1.0 + 2.0 * math.sqrt(q0))
    q2 = root9 ** 2 + q1 - q0 - 0.25
    s = derive_constants(NuProblem(1.0, 1.0, 1.0, q0, q1, q2))
    assert s.sqrt_c9 == pytest.approx(1.9, rel=1e-14)
    assert abs(nu_energy_residual(s, 0)) <= 1e-13


def _symbolic_residual():
    c1, c2, c3, q0, q1, q2, n = sympy.symbols("c1 c2 c3 q0 q1 q2 n", real=True)
    c4 = (1 - c1) / 2
    c5 = (c2 - 2 * c3) / 2
    c6 = c5 ** 2 + q2
    c7 = 2 * c4 * c5 - q1
    c8 = c4 ** 2 + q0
    c9 = c3 * c7 + c3 ** 2 * c8 + c6
    expr = (c2 * n - (2 * n + 1) * c5 + (2 * n + 1) * (sympy.sqrt(c9) + c3 * sympy.sqrt(c8))
            + n * (n - 1) * c3 + c7 + 2 * c3 * c8 + 2 * sympy.sqrt(c8) * sympy.sqrt(c9))
    return sympy.lambdify((c1, c2, c3, q0, q1, q2, n), expr, "mpmath")


_SYMBOLIC = _symbolic_residual()


@given(st.floats(0.2, 3.0), st.floats(0.5, 4.0), st.floats(0.3, 2.0),
       st.floats(0.0, 20.0), st.floats(-20.0, 20.0), st.floats(0.0, 30.0), st.integers(0, 8))
def test_residual_matches_independent_expression(c1, c2, c3, q0, q1, q2, n):
    p = NuProblem(c1, c2, c3, q0, q1, q2)
    try:
        s = derive_constants(p, require_decreasing_tau=False)
    except NoNuSolution:
        return
    ref = float(_SYMBOLIC(c1, c2, c3, q0, q1, q2, n))
    got = nu_energy_residual(s, n)
    assert abs(got - ref) <= 1e-14 * max(1.0, abs(ref)) * 16


def _a5_root(p, q, d0, state):
    signs = nu_root_signs(state)

    def residual(E):
        return nu_energy_residual(derive_constants(nu_problem(E, p, q, d0), signs, False), q.n)

    return brentq(residual, state.E - 1e-6, state.E + 1e-6, xtol=1e-16)


@pytest.mark.parametrize("entry", bound_rows("table2"), ids=row_id)
def test_general_equation_root_matches_closed_form(entry):
    row, p, q, d0, state = entry
    assert abs(_a5_root(p, q, d0, state) - state.E) <= 1e-10


def _sample_solution():
    state = solve_energy(TABLE, QuantumNumbers(2, 1), 0.0)
    return state, derive_constants(nu_problem(state.E, TABLE, state.qn, 0.0))


def test_polynomial_identities():
    state, s = _sample_solution()
    prob = s.problem
    z = np.linspace(0.05, 0.95, 9)
    sigma = z * (1 - prob.c3 * z)
    sigma_d1 = 1 - 2 * prob.c3 * z
    sigma_d2 = -2 * prob.c3
    tau_tilde = prob.c1 - prob.c2 * z
    sigma_tilde = -prob.q2 * z * z + prob.q1 * z - prob.q0
    pi = s.pi(z)
    pi_slope = s.pi_coeffs[1]
    scale = np.max(np.abs(sigma_tilde)) + 1.0
    assert np.max(np.abs(pi * pi - (sigma_d1 - tau_tilde) * pi + sigma_tilde - s.k * sigma)) <= 1e-12 * scale
    assert np.allclose(s.tau(z), tau_tilde + 2 * pi, rtol=0, atol=1e-12)
    n = state.n
    lhs = s.k + pi_slope
    rhs = -n * s.tau_coeffs[1] - 0.5 * n * (n - 1) * sigma_d2
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_wavefunction_ground_level_is_the_envelope():
    _, s = _sample_solution()
    z = np.linspace(0.01, 0.99, 11)
    assert np.allclose(nu_wavefunction(s, 0, z), z ** s.c12 * (1 - z) ** s.c13, rtol=1e-15)


def test_wavefunction_vanishes_at_small_z():
    state, s = _sample_solution()
    values = [abs(nu_wavefunction(s, state.n, z)) for z in (1e-4, 1e-8, 1e-12)]
    assert values[0] > values[1] > values[2]
    assert values[2] < 1e-12


@pytest.mark.parametrize("entry", bound_rows("table2"), ids=row_id)
def test_wavefunction_forms_agree(entry):
    row, p, q, d0, state = entry
    s = derive_constants(nu_problem(state.E, p, q, d0))
    z = np.linspace(0.01, 0.99, 50)
    hyp = np.asarray(nu_wavefunction(s, q.n, z, "hypergeometric"))
    jac = np.asarray(nu_wavefunction(s, q.n, z, "jacobi"))
    assert np.max(np.abs(hyp - jac)) <= 1e-12 * np.max(np.abs(hyp))


@pytest.mark.parametrize("z", [0.0, 1.0, -0.1, 1.5])
def test_wavefunction_domain(z):
    _, s = _sample_solution()
    with pytest.raises(ValueError):
        nu_wavefunction(s, 0, z)


def test_wavefunction_unknown_form():
    _, s = _sample_solution()
    with pytest.raises(ValueError, match="form"):
        nu_wavefunction(s, 0, 0.5, form="legendre")
