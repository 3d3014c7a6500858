import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdho import field_theory as ft
from tdho._parallel import chunked_map, resolve_workers
from tdho.errors import ContractError, DivergenceError, DomainError

MINK, T3, S = ft.ModeFamily("minkowski"), ft.ModeFamily("gowdy_t3"), ft.ModeFamily("gowdy_s")
REP = ft.STANDARD


def test_family_validation():
    with pytest.raises(ContractError):
        ft.ModeFamily("bogus")
    with pytest.raises(ContractError):
        ft.ModeFamily("finite", (1.0, -2.0))
    with pytest.raises(DomainError):
        MINK.check_mode(0)
    with pytest.raises(DomainError):
        S.check_mode(-3)
    with pytest.raises(DomainError):
        T3.check_times(-1.0)
    assert MINK.multiplicity == 2 and S.multiplicity == 1
    assert S.kappa(2, math.pi / 2) == pytest.approx(6 + 0.5)
    assert T3.kappa(-3, 2.0) == pytest.approx(9 + 1 / 16)


def test_single_mode_pair_matches_ode():
    from tdho.classical import solve_fundamental
    for fam, ell in [(T3, 4), (S, 3), (MINK, -5)]:
        a = fam.pair(ell, 1.0, 2.0)
        b = solve_fundamental(fam.profile(ell), 1.0, 2.0)
        assert abs(a.c - b.c) < 1e-8 and abs(a.s - b.s) < 1e-8


def test_minkowski_has_no_mixing():
    ells, a, b = ft.mode_bogoliubov_sweep(MINK, REP, 0.0, 1.7, 500)
    assert np.max(np.abs(b)) < 1e-9
    assert np.allclose(a, np.exp(-1j * ells * 1.7), atol=1e-9)


@pytest.mark.parametrize("fam", [MINK, T3, S, ft.ModeFamily("tachyonic"),
                                 ft.ModeFamily("finite", (1.0, 2.5, 7.0))])
def test_hyperbolic_identity_per_mode(fam):
    t0, t = (1.0, 2.0) if fam.kind != "tachyonic" else (0.0, 0.5)
    _, a, b = ft.mode_bogoliubov_sweep(fam, REP, t0, t, 60)
    assert np.max(np.abs((np.abs(a) ** 2 - np.abs(b) ** 2 - 1) / np.abs(a) ** 2)) < 1e-10


def test_sweep_matches_single_modes():
    ells, a, b = ft.mode_bogoliubov_sweep(T3, REP, 1.0, 2.0, 40)
    for ell in (1, 17, 40):
        aa, bb = ft.mode_bogoliubov(T3, REP, ell, 1.0, 2.0)
        assert aa == pytest.approx(a[ell - 1], abs=1e-12)
        assert bb == pytest.approx(b[ell - 1], abs=1e-12)


def test_phase_freedom_moves_only_phases():
    rep = ft.RepresentationSeq(gamma=lambda ell: 0.3 * ell)
    _, a0, b0 = ft.mode_bogoliubov_sweep(S, REP, 1.0, 2.0, 30)
    _, a1, b1 = ft.mode_bogoliubov_sweep(S, rep, 1.0, 2.0, 30)
    assert np.allclose(np.abs(a0), np.abs(a1), atol=1e-13)
    assert np.allclose(np.abs(b0), np.abs(b1), atol=1e-13)


def test_custom_representation_checks_ccr():
    rep = ft.RepresentationSeq("custom", alpha_fn=lambda ell: 1.0, beta_fn=lambda ell: 1.0)
    with pytest.raises(ContractError):
        rep.coefficients(MINK, 1)


@pytest.mark.parametrize("fam", [T3, S])
def test_gowdy_unitarity_convergent(fam):
    rep = ft.unitarity_test(fam, REP, 1.0, 2.0, [250, 500, 1000, 2000])
    assert rep.verdict == "convergent"
    assert rep.fit.lower > 1
    assert rep.partial_sums == sorted(rep.partial_sums)
    assert rep.max_defect < 1e-10


def test_minkowski_and_tachyonic_verdicts():
    rep = ft.unitarity_test(MINK, REP, 0.0, 1.0, [100, 200])
    assert rep.verdict == "convergent" and rep.fit is None
    rep = ft.unitarity_test(ft.ModeFamily("tachyonic"), REP, 0.0, 1.0, [50, 100])
    assert rep.verdict == "divergent"
    with pytest.raises(ContractError):
        ft.unitarity_test(MINK, REP, 0.0, 1.0, [200, 100])


def test_fit_tail_recovers_exponent():
    ells = np.arange(1, 3001)
    terms = ells ** -2.5 * (1 + 0.3 * np.sin(ells))
    fit = ft.fit_tail(ells, terms)
    assert abs(fit.exponent - 2.5) < 0.1
    assert fit.lower < fit.exponent < fit.upper
    assert ft.verdict_of(fit) == "convergent"
    flat = ft.fit_tail(ells, 1.0 / ells**0.5)
    assert ft.verdict_of(flat) == "divergent"


def test_vacuum_amplitude_magnitude():
    v = ft.vacuum_amplitude_magnitude(T3, REP, 1.0, 2.0, 1000)
    _, a, _ = ft.mode_bogoliubov_sweep(T3, REP, 1.0, 2.0, 1000)
    assert v.value == pytest.approx(np.prod(np.abs(a) ** -1.0), rel=1e-12)
    assert 0 <= v.tail_bound < 1e-6
    assert ft.vacuum_amplitude_magnitude(MINK, REP, 0.0, 1.0, 100).value == pytest.approx(1.0)
    with pytest.raises(DivergenceError):
        ft.vacuum_amplitude_magnitude(ft.ModeFamily("tachyonic"), REP, 0.0, 1.0, 100)


@pytest.mark.parametrize("fam,ell", [(T3, 3), (S, 4), (MINK, 2)])
def test_mode_vacuum_element_modulus(fam, ell):
    el = ft.mode_vacuum_element(fam, REP, ell, 1.0, 2.0)
    a, _ = ft.mode_bogoliubov(fam, REP, ell, 1.0, 2.0)
    assert abs(el) == pytest.approx(abs(a) ** -0.5, abs=1e-10)


def test_normal_ordered_minkowski_vacuum_is_invariant():
    el = ft.mode_vacuum_element(MINK, REP, 3, 0.0, 1.0, theta=ft.normal_order_theta(MINK, 3))
    assert el == pytest.approx(1.0, abs=1e-12)


def test_field_kernel_factor_value():
    kv = ft.field_kernel_factor(MINK, REP, 2, 0.0, 0.7)
    assert ft.field_kernel_factor(MINK, REP, 2, 0.0, 0.7, 0.3, -0.1) == pytest.approx(kv(0.3, -0.1))


def test_minkowski_obstruction():
    rep = ft.factorization_obstruction(MINK, REP, 0.0, 1.0, 500)
    ells = rep.ells
    expected = (1 / (2 * ells) - ells / 2) ** 2 * np.sin(ells * 1.0) ** 2
    assert np.allclose(rep.uniR_terms, expected, rtol=1e-10, atol=1e-12)
    assert rep.uniR_max > 1e3
    assert not rep.uniR_tends_to_zero
    assert rep.rho_scaled_last == pytest.approx(1.0)


@pytest.mark.parametrize("fam", [T3, S])
def test_gowdy_rho_limit(fam):
    rep = ft.factorization_obstruction(fam, REP, 1.0, 2.0, 500)
    assert abs(rep.rho_scaled_last - 1) < 0.05
    assert not rep.rho_limit_one
    assert not rep.uniR_tends_to_zero


@pytest.mark.parametrize("fam", [MINK, T3, S])
def test_block_composition_reproduces_evolution(fam):
    ells, a, b = ft.mode_bogoliubov_sweep(fam, REP, 1.0, 2.0, 200)
    for ell in (1, 2, 7, 50, 200):
        f = ft.appendix_factors(fam, REP, ell, 1.0, 2.0)
        m = f.composed()
        assert abs(m.p - a[ell - 1]) + abs(m.q - b[ell - 1]) < 1e-8
        for blk in (f.D, f.S, f.R):
            assert abs(blk.defect) < 1e-9


def test_blocks_identity_at_start_and_minkowski_structure():
    f = ft.appendix_factors(T3, REP, 5, 1.3, 1.3)
    for blk in (f.D, f.S, f.R):
        assert blk.p == pytest.approx(1.0) and blk.q == pytest.approx(0.0, abs=1e-14)
    g = ft.appendix_factors(MINK, REP, 4, 0.0, 1.0)
    assert g.D.p == 1 and g.D.q == 0
    assert g.S.p == pytest.approx(1.0) and g.S.q == pytest.approx(0.0)


def test_block_off_diagonals_square_summable():
    d = ft.mode_ep_data(T3, 1.0, 2.0, 2000)
    al, be = REP.arrays(T3, d.ells)
    qs = np.array([[abs(x.q) ** 2 for x in ft.block_maps(al[i], be[i], d.rho0[i], d.rho_dot0[i],
                                                         d.rho[i], d.rho_dot[i], d.sin_phase[i],
                                                         d.cos_phase[i])]
                   for i in range(len(d.ells))])
    for k in range(3):
        fit = ft.fit_tail(d.ells, qs[:, k])
        assert fit.exponent > 1


@pytest.mark.parametrize("fam", [T3, S])
def test_variances_asymptotics(fam):
    for t in (1.5, 2.0):
        dq, dp = ft.field_coherent_variances(fam, REP, 500, 1.0, t)
        assert 0.95 <= dq * math.sqrt(2 * 500) <= 1.05
        assert 0.95 <= dp * math.sqrt(2 / 500) <= 1.05


@given(ell=st.integers(1, 2000), t=st.floats(-5, 5))
def test_minkowski_variances_exact(ell, t):
    dq, dp = ft.field_coherent_variances(MINK, REP, ell, 0.0, t)
    assert dq == pytest.approx(1 / math.sqrt(2 * ell), rel=1e-12)
    assert dp == pytest.approx(math.sqrt(ell / 2), rel=1e-12)


def test_coherent_means_follow_flow():
    q, p = ft.field_coherent_means(T3, REP, 3, 0.5 + 0.2j, 1.0, 2.0)
    alpha, beta = REP.coefficients(T3, 3)
    q0, p0 = 2 * (alpha * (0.5 + 0.2j)).real, 2 * (beta * (0.5 + 0.2j)).real
    assert (q, p) == pytest.approx(T3.pair(3, 1.0, 2.0).flow(q0, p0))


def test_t3_constraint():
    assert ft.t3_constraint_check({2: 1.0, -2: 1.0}) == 0
    assert ft.t3_constraint_check({1: 1.0}) == 1
    assert ft.t3_constraint_check({1: 1.0, -2: 1 / math.sqrt(2)}) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        ft.t3_constraint_check({0: 1.0})


def test_worker_count_does_not_change_results(monkeypatch):
    monkeypatch.delenv("TDHO_WORKERS", raising=False)
    one = ft.unitarity_test(S, REP, 1.0, 2.0, [1500], workers=1)
    many = ft.unitarity_test(S, REP, 1.0, 2.0, [1500], workers=3)
    assert one.partial_sums == many.partial_sums
    assert np.array_equal(one.terms, many.terms)
    monkeypatch.setenv("TDHO_WORKERS", "5")
    assert resolve_workers(1) == 5


def test_chunked_map_order():
    out = chunked_map(lambda x: (x * 2,), np.arange(1000), workers=1, chunk=7)
    assert np.array_equal(out[0], np.arange(1000) * 2)
    assert chunked_map(lambda x: (x,), [], workers=1) == ()
