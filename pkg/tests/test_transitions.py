import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdho import profiles
from tdho.classical import closed_form_constant, solve_fundamental
from tdho.errors import CausticError, ContractError
from tdho.models import pair_for
from tdho.transitions import (amplitude, amplitude_oracle, amplitude_table, bogoliubov,
                              decay_ratio, hermite_function, lambda_det_closed, lambda_matrix,
                              taylor_coeff, taylor_coeff_grouped, vacuum_decay_coeffs,
                              vacuum_persistence, vacuum_phase_near_start)


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("dt", [0.3, 1.0, math.pi / 2])
def test_tiho_amplitudes_diagonal(omega, dt):
    pair = closed_form_constant(omega**2, 0.0, dt)
    for n1 in range(5):
        for n2 in range(5):
            ref = cmath.exp(-1j * omega * (n1 + 0.5) * dt) if n1 == n2 else 0.0
            assert amplitude(pair, None, omega, n1, omega, n2) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("dt", [math.pi, 3 * math.pi, 2 * math.pi])
def test_tiho_amplitudes_at_caustics(dt):
    pair = closed_form_constant(1.0, 0.0, dt)
    for n in range(4):
        ref = cmath.exp(-1j * (n + 0.5) * dt)
        assert amplitude(pair, None, 1.0, n, 1.0, n) == pytest.approx(ref, abs=1e-12)
        assert amplitude(pair, None, 1.0, n, 1.0, n + 2) == pytest.approx(0.0, abs=1e-12)


def test_parity_entries_are_exact_zeros():
    pair = solve_fundamental(profiles.mathieu(2.0, 0.3), 0.0, 2.0)
    tab = amplitude_table(pair, None, 1.0, 4, 1.3, 6)
    for (a, b), v in tab.entries.items():
        if (a + b) % 2:
            assert v == 0


@pytest.mark.parametrize("n1,n2", [(0, 0), (0, 2), (1, 3), (2, 2)])
def test_oracle_agreement_mathieu(n1, n2):
    pair = solve_fundamental(profiles.mathieu(2.0, 0.3), 0.0, 2.0)
    a = amplitude(pair, None, 1.0, n1, 1.0, n2)
    assert a == pytest.approx(amplitude_oracle(pair, None, 1.0, n1, 1.0, n2), abs=1e-7)


def test_oracle_agreement_different_frequencies():
    pair = pair_for(profiles.gowdy_t3(1.0), 1.0, 2.0)
    a = amplitude(pair, None, 0.8, 1, 1.5, 1)
    assert a == pytest.approx(amplitude_oracle(pair, None, 0.8, 1, 1.5, 1), abs=1e-7)


def test_oracle_rejects_high_levels():
    pair = closed_form_constant(1.0, 0.0, 1.0)
    with pytest.raises(ContractError):
        amplitude_oracle(pair, None, 1.0, 9, 1.0, 0)


def test_row_norms_approach_one():
    pair = solve_fundamental(profiles.mathieu(2.0, 0.3), 0.0, 2.0)
    tab = amplitude_table(pair, None, 1.0, 2, 1.0, 64)
    for n1 in range(3):
        assert 0.999 <= tab.row_norm(n1) <= 1 + 1e-8
    partial = [sum(abs(tab.entries[(0, b)]) ** 2 for b in range(n + 1)) for n in range(0, 65, 8)]
    assert all(x <= y + 1e-15 for x, y in zip(partial, partial[1:]))


def test_lambda_matrix_and_determinant():
    pair = solve_fundamental(profiles.mathieu(2.0, 0.3), 0.0, 1.3)
    lam = lambda_matrix(pair, 1.0, 2.0)
    assert lam.det == pytest.approx(lambda_det_closed(pair, 1.0, 2.0), abs=1e-10)
    assert np.allclose(lam.matrix @ lam.inverse(), np.eye(2), atol=1e-12)
    with pytest.raises(CausticError):
        lambda_matrix(closed_form_constant(1.0, 0.0, math.pi), 1.0, 1.0)
    with pytest.raises(ContractError):
        lambda_matrix(pair, -1.0, 1.0)


def test_taylor_coefficients_agree():
    b11, b12, b22 = 0.3 - 0.1j, 0.7 + 0.2j, -0.2 + 0.4j
    for n1, n2 in [(0, 0), (2, 0), (3, 1), (4, 6), (5, 7)]:
        assert taylor_coeff(b11, b12, b22, n1, n2) == pytest.approx(
            taylor_coeff_grouped(b11, b12, b22, n1, n2), rel=1e-12, abs=1e-15)
    assert taylor_coeff(b11, b12, b22, 1, 2) == 0


@pytest.mark.parametrize("prof,t0,t", [
    (profiles.mathieu(2.0, 0.3), 0.0, 2.0),
    (profiles.gowdy_t3(1.0), 1.0, 2.0),
    (profiles.gowdy_s(1.0), 1.0, 2.0),
    (profiles.free(), 0.0, 3.0),
    (profiles.tachyonic(1.0), 0.0, 1.0),
])
def test_vacuum_identities(prof, t0, t):
    pair = pair_for(prof, t0, t)
    back = bogoliubov(pair.reversed(), 1.0)
    lam = lambda_matrix(pair, 1.0, 1.0)
    r = 2 * lam.inverse()[1, 1] - 1
    assert r == pytest.approx(decay_ratio(pair, 1.0), abs=1e-9)
    assert abs(vacuum_persistence(pair, None, 1.0)) == pytest.approx(abs(back.A) ** -0.5, abs=1e-8)
    assert abs(bogoliubov(pair, 1.0).defect) < 1e-10


def test_free_particle_decay_coefficients_have_unit_norm():
    pair = closed_form_constant(0.0, 0.0, 1.0)
    coeffs = vacuum_decay_coeffs(pair, None, 1.0, 64)
    assert math.fsum(abs(c) ** 2 for c in coeffs) == pytest.approx(1.0, abs=1e-6)
    direct = [amplitude(pair, None, 1.0, 0, 1.0, 2 * n) for n in range(6)]
    assert np.allclose(coeffs[:6], direct, atol=1e-13)


def test_vacuum_phase_near_start():
    pair = solve_fundamental(profiles.mathieu(2.0, 0.3), 0.0, 0.05)
    ph = cmath.phase(vacuum_persistence(pair, None, 1.0))
    assert vacuum_phase_near_start(pair, 1.0) == pytest.approx(ph, abs=1e-9)


def test_hermite_functions_orthonormal():
    q = np.linspace(-12, 12, 6001)
    h = q[1] - q[0]
    for m in range(5):
        for n in range(5):
            val = np.sum(hermite_function(m, 1.3, q) * hermite_function(n, 1.3, q)) * h
            assert val == pytest.approx(1.0 if m == n else 0.0, abs=1e-10)


@given(a=st.floats(-1.0, 3.0), b=st.floats(-0.5, 0.5), t=st.floats(0.1, 6.0),
       w=st.floats(0.3, 3.0))
def test_bogoliubov_hyperbolic_identity(a, b, t, w):
    pair = solve_fundamental(profiles.mathieu(a, b), 0.0, t)
    assert abs(bogoliubov(pair, w).defect) < 1e-8 * max(1.0, abs(bogoliubov(pair, w).A) ** 2)


def test_integrated_pair_at_a_caustic():
    # the integrator leaves |s| ~ 1e-11 at omega t = pi
    pair = solve_fundamental(profiles.constant(4.0), 0.0, math.pi / 2)
    assert pair.s != 0
    for n in range(4):
        ref = cmath.exp(-1j * 2 * (n + 0.5) * math.pi / 2)
        assert amplitude(pair, None, 2.0, n, 2.0, n) == pytest.approx(ref, abs=1e-9)
