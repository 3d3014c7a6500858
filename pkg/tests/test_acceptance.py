"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary (see conftest.py) and by ``python tests/test_acceptance.py``.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from tdho import field_theory as ft
from tdho import profiles
from tdho.classical import closed_form_constant, locate_zeros, solve_fundamental
from tdho.ermakov import (EPQuadraticForm, ep_from_fundamental, fundamental_from_ep,
                          locate_s_zeros)
from tdho.models import canonical_ep_solution, pair_for
from tdho.propagator import (GaussianPacket, evolve_gaussian, feynman_soriau, kernel,
                             kernel_via_factorization, pde_residual)
from tdho.semiclassical import SemiclassicalState, expectations, uncertainties
from tdho.transitions import (amplitude, amplitude_oracle, amplitude_table, bogoliubov,
                              lambda_matrix, vacuum_decay_coeffs, vacuum_persistence)

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def _pair_err(p, q):
    return max(abs(p.c - q.c), abs(p.s - q.s), abs(p.c_dot - q.c_dot), abs(p.s_dot - q.s_dot))


ALL_PROFILES = [
    (profiles.constant(1.0), 0.0, 1.3),
    (profiles.constant(2.5), 0.0, 4.0),
    (profiles.free(), 0.0, 2.0),
    (profiles.tachyonic(1.0), 0.0, 1.5),
    (profiles.mathieu(2.0, 0.3), 0.0, 2.0),
    (profiles.mathieu(1.0, 0.1), 0.0, 5.0),
    (profiles.gowdy_t3(1.0), 1.0, 2.0),
    (profiles.gowdy_t3(2.0), 0.5, 7.0),
    (profiles.gowdy_s(1.0), 1.0, 2.0),
    (profiles.gowdy_s(math.sqrt(6.0)), 0.5, 2.5),
]


def test_criterion_01_tiho_exactness():
    start = time.perf_counter()
    ode_err = amp_err = 0.0
    for w in (0.5, 1.0, 2.0):
        for dt in (0.3, 1.0, math.pi / 2):
            p = solve_fundamental(profiles.constant(w * w), 0.0, dt)
            ode_err = max(ode_err, _pair_err(p, closed_form_constant(w * w, 0.0, dt)))
            for n1 in range(5):
                for n2 in range(5):
                    ref = np.exp(-1j * w * (n1 + 0.5) * dt) if n1 == n2 else 0.0
                    amp_err = max(amp_err, abs(amplitude(p, None, w, n1, w, n2) - ref))
    elapsed = time.perf_counter() - start
    record(1, ode_err < 1e-8 and amp_err < 1e-7 and elapsed < 10,
           f"ode err {ode_err:.1e} (<1e-8), amplitude err {amp_err:.1e} (<1e-7), {elapsed:.1f}s (<10s)")


def test_criterion_02_wronskian_and_bogoliubov():
    rng = np.random.default_rng(20240601)
    kinds = ["constant", "free", "tachyonic", "mathieu", "gowdy_t3", "gowdy_s"]
    w_err = b_err = 0.0
    for i in range(100):
        kind = kinds[i % len(kinds)]
        if kind == "constant":
            prof, lo, hi = profiles.constant(rng.uniform(0.1, 4.0)), -3.0, 3.0
        elif kind == "free":
            prof, lo, hi = profiles.free(), -3.0, 3.0
        elif kind == "tachyonic":
            prof, lo, hi = profiles.tachyonic(rng.uniform(0.1, 1.0)), -2.0, 2.0
        elif kind == "mathieu":
            prof, lo, hi = profiles.mathieu(rng.uniform(-1, 4), rng.uniform(-1, 1)), -3.0, 3.0
        elif kind == "gowdy_t3":
            prof, lo, hi = profiles.gowdy_t3(rng.uniform(0.2, 5.0)), 0.05, 10.0
        else:
            prof, lo, hi = profiles.gowdy_s(rng.uniform(0.0, 5.0)), 0.1, math.pi - 0.1
        t0, t = rng.uniform(lo, hi, 2)
        p = solve_fundamental(prof, t0, t)
        w_err = max(w_err, abs(p.wronskian - 1))
        b_err = max(b_err, abs(bogoliubov(p, rng.uniform(0.3, 3.0)).defect))
    record(2, w_err < 1e-8 and b_err < 1e-10,
           f"max |W-1| {w_err:.1e} (<1e-8), max ||A|^2-|B|^2-1| {b_err:.1e} (<1e-10) over 100 draws")


def test_criterion_03_theorem_round_trip():
    forms = [EPQuadraticForm.identity(), EPQuadraticForm.normalized(2.0, 0.5, 1.0)]
    cases = [(profiles.mathieu(2.0, 0.3), 0.0, 8.0), (profiles.gowdy_t3(1.5), 1.0, 9.0),
             (profiles.gowdy_s(2.0), 1.0, 3.0), (profiles.constant(3.0), 0.0, 5.0)]
    pair_err = zero_err = 0.0
    for prof, t0, t1 in cases:
        ts = np.linspace(t0, t1, 3000)
        ref_z = [z for z in locate_zeros(ts, [solve_fundamental(prof, t0, x).s for x in ts],
                                         lambda x: solve_fundamental(prof, t0, x).s) if z > t0]
        for form in forms:
            ep = ep_from_fundamental(form, prof, t0)
            for t in np.linspace(t0 + 0.1, t1, 6):
                pair_err = max(pair_err, _pair_err(fundamental_from_ep(ep, t0, t),
                                                   solve_fundamental(prof, t0, t)))
            zs = locate_s_zeros(ep, t0, (t0, t1))
            if len(zs) != len(ref_z):
                zero_err = math.inf
            else:
                zero_err = max([zero_err] + [abs(a - b) for a, b in zip(zs, ref_z)])
    record(3, pair_err < 1e-6 and zero_err < 1e-6,
           f"pair err {pair_err:.1e} (<1e-6), zero-set err {zero_err:.1e} (<1e-6)")


def test_criterion_04_propagator_validation():
    start = time.perf_counter()
    q = np.linspace(-2, 2, 9)
    fs = max(float(np.max(np.abs(kernel(closed_form_constant(1.0, 0.0, dt), None, q, 0.3)
                                  - feynman_soriau(dt, q, 0.3)))) for dt in (0.4, 2.5, 4.0, 7.0))
    pde = max(pde_residual(profiles.mathieu(2.0, 0.3), 0.0, q, [0.5, 1.0, 1.5]),
              pde_residual(profiles.gowdy_t3(1.0), 1.0, q, [1.5, 2.5, 3.5]),
              pde_residual(profiles.gowdy_s(1.0), 1.0, q, [1.3, 1.6, 2.0]))
    pk = GaussianPacket.coherent(1.3, 0.4, 0.9)
    norm_err, crossings = 0.0, []
    for prof, t0, t in [(profiles.mathieu(2.0, 0.3), 0.0, 12.0), (profiles.gowdy_t3(2.0), 1.0, 6.0)]:
        pair = pair_for(prof, t0, t)
        crossings.append(pair.index_s)
        norm_err = max(norm_err, abs(evolve_gaussian(pair, None, pk).norm - 1))
    rho_err = 0.0
    forms = [EPQuadraticForm.identity(), EPQuadraticForm.normalized(3.0, -0.7, 1.0)]
    for prof, t0, ts in [(profiles.mathieu(2.0, 0.3), 0.0, [0.6, 5.0]),
                         (profiles.gowdy_t3(1.0), 1.0, [0.5, 7.0]),
                         (profiles.gowdy_s(2.0), 1.0, [1.6, 2.6])]:
        for t in ts:
            direct = kernel(pair_for(prof, t0, t), None, q, 0.35)
            for f in forms:
                ep = ep_from_fundamental(f, prof, t0)
                rho_err = max(rho_err, float(np.max(np.abs(
                    kernel_via_factorization(ep, t0, t, q, 0.35) - direct))))
    prof = profiles.mathieu(2.0, 0.3)
    tstar = locate_s_zeros(ep_from_fundamental(forms[0], prof, 0.0), 0.0, (0.0, 4.0))[0]
    at = pair_for(prof, 0.0, tstar)
    at = type(at)(at.t0, at.t, at.c, 0.0, at.c_dot, at.s_dot, at.index_s, at.index_c)
    pk = GaussianPacket.coherent(1.0, 0.3, 0.2)
    mid = evolve_gaussian(at, None, pk)(q)
    side = [evolve_gaussian(pair_for(prof, 0.0, tstar + d), None, pk)(q) for d in (-1e-4, 1e-4)]
    cont = float(np.max(np.abs(0.5 * (side[0] + side[1]) - mid)))
    elapsed = time.perf_counter() - start
    ok = (fs < 1e-10 and pde < 1e-3 and norm_err < 1e-10 and min(crossings) >= 3
          and rho_err < 1e-8 and cont < 1e-6 and elapsed < 120)
    record(4, ok, f"(a) {fs:.1e} (b) {pde:.1e} (c) {norm_err:.1e} over {min(crossings)}+ caustics "
                  f"(d) {rho_err:.1e} (e) {cont:.1e}; {elapsed:.1f}s (<120s)")


def test_criterion_05_amplitude_oracle():
    start = time.perf_counter()
    err, parity, rows = 0.0, 0.0, []
    for prof, t0, t in [(profiles.mathieu(2.0, 0.3), 0.0, 2.0), (profiles.gowdy_t3(1.0), 1.0, 2.0)]:
        pair = pair_for(prof, t0, t)
        for n1 in range(5):
            for n2 in range(5):
                a = amplitude(pair, None, 1.0, n1, 1.0, n2)
                if (n1 + n2) % 2:
                    parity = max(parity, abs(a))
                    continue
                err = max(err, abs(a - amplitude_oracle(pair, None, 1.0, n1, 1.0, n2)))
        tab = amplitude_table(pair, None, 1.0, 2, 1.0, 64)
        rows += [tab.row_norm(n1) for n1 in range(3)]
    elapsed = time.perf_counter() - start
    ok = err < 1e-5 and parity == 0 and min(rows) >= 0.999 and max(rows) <= 1 + 1e-8 and elapsed < 300
    record(5, ok, f"oracle err {err:.1e} (<1e-5), parity max {parity:.0e} (=0), row sums in "
                  f"[{min(rows):.6f}, {max(rows):.12f}]; {elapsed:.1f}s (<300s)")


def test_criterion_06_vacuum_decay():
    r_err = v_err = 0.0
    for prof, t0, t in ALL_PROFILES:
        pair = pair_for(prof, t0, t)
        back = bogoliubov(pair.reversed(), 1.0)
        r = 2 * lambda_matrix(pair, 1.0, 1.0).inverse()[1, 1] - 1
        r_err = max(r_err, abs(r + back.B / back.A))
        v_err = max(v_err, abs(abs(vacuum_persistence(pair, None, 1.0)) - abs(back.A) ** -0.5))
    coeffs = vacuum_decay_coeffs(closed_form_constant(0.0, 0.0, 1.0), None, 1.0, 64)
    norm = abs(math.fsum(abs(c) ** 2 for c in coeffs) - 1)
    record(6, r_err < 1e-9 and v_err < 1e-8 and norm < 1e-6,
           f"ratio err {r_err:.1e} (<1e-9), |vacuum| err {v_err:.1e} (<1e-8), free norm err {norm:.1e} (<1e-6)")


def test_criterion_07_semiclassical():
    mean_err = prod_err = 0.0
    for prof, t0, t in ALL_PROFILES:
        m = prof.model
        if m.kind in ("gowdy_t3", "gowdy_s") or (m.kappa0 is not None and m.kappa0 > 0):
            ep = canonical_ep_solution(m, t0)
        else:
            ep = ep_from_fundamental(EPQuadraticForm.normalized(2.0, 0.3, 1.0), prof, t0)
        state = SemiclassicalState.from_cauchy(ep, t0, 0.8, -0.4)
        for tt in np.linspace(t0, t, 5)[1:]:
            mq, mp = expectations(state, tt)
            cq, cp = pair_for(prof, t0, tt).flow(0.8, -0.4)
            mean_err = max(mean_err, abs(mq - cq), abs(mp - cp))
            u = uncertainties(ep, tt)
            r, rd = ep.values(tt)
            prod_err = max(prod_err, abs(u.product - 0.5 * math.sqrt(1 + (r * rd) ** 2)))
    t3 = canonical_ep_solution(profiles.gowdy_t3(1.0).model, 1.0)
    dq = [uncertainties(t3, t).dq for t in (1e-2, 1e-4, 1e-6, 1e-8)]
    to_zero = all(b < a for a, b in zip(dq, dq[1:])) and dq[-1] < 0.05
    plateau = uncertainties(t3, 50.0).product - 0.5
    s = canonical_ep_solution(profiles.gowdy_s(math.sqrt(6.0)).model, math.pi / 2)
    sq = np.array([uncertainties(s, t).dq for t in np.linspace(0.05, math.pi - 0.05, 300)])
    bounded = bool(np.all(np.isfinite(sq)) and sq.max() < 10)
    oscill = int(np.sum(np.diff(np.sign(np.diff(sq))) != 0))
    ok = mean_err < 1e-8 and prod_err < 1e-10 and to_zero and plateau < 1e-2 and bounded and oscill >= 2
    record(7, ok, f"mean err {mean_err:.1e} (<1e-8), product err {prod_err:.1e} (<1e-10), "
                  f"T3 dq(1e-8)={dq[-1]:.3f}, plateau {plateau:.1e} (<1e-2), S max dq {sq.max():.2f}, "
                  f"{oscill} turning points")


def test_criterion_08_field_unitarity():
    start = time.perf_counter()
    _, _, b = ft.mode_bogoliubov_sweep(ft.ModeFamily("minkowski"), ft.STANDARD, 1.0, 2.0, 2000)
    mink = float(np.max(np.abs(b)))
    sched = [250, 500, 1000, 2000]
    reps = {k: ft.unitarity_test(ft.ModeFamily(k), ft.STANDARD, 1.0, 2.0, sched, workers=4)
            for k in ("gowdy_t3", "gowdy_s")}
    tach = ft.unitarity_test(ft.ModeFamily("tachyonic"), ft.STANDARD, 0.0, 1.0, [50, 100])
    elapsed = time.perf_counter() - start
    ok = (mink <= 1e-9 and all(r.verdict == "convergent" and r.fit.lower > 1 for r in reps.values())
          and tach.verdict == "divergent" and elapsed < 600)
    detail = ", ".join(f"{k} p={r.fit.exponent:.2f} [{r.fit.lower:.2f}, {r.fit.upper:.2f}]"
                       for k, r in reps.items())
    record(8, ok, f"Minkowski max|B| {mink:.1e} (<=1e-9), {detail}, tachyonic {tach.verdict}; "
                  f"{elapsed:.1f}s (<600s)")


def test_criterion_09_factorization_obstructions():
    mink = ft.factorization_obstruction(ft.ModeFamily("minkowski"), ft.STANDARD, 0.0, 1.0, 500)
    rho = {k: ft.factorization_obstruction(ft.ModeFamily(k), ft.STANDARD, 1.0, 2.0, 500)
           for k in ("gowdy_t3", "gowdy_s")}
    comp = 0.0
    for kind in ("minkowski", "gowdy_t3", "gowdy_s"):
        fam = ft.ModeFamily(kind)
        ells, a, b = ft.mode_bogoliubov_sweep(fam, ft.STANDARD, 1.0, 2.0, 200)
        d = ft.mode_ep_data(fam, 1.0, 2.0, 200)
        al, be = ft.STANDARD.arrays(fam, ells)
        for i in range(len(ells)):
            D, S, R = ft.block_maps(al[i], be[i], d.rho0[i], d.rho_dot0[i], d.rho[i], d.rho_dot[i],
                                    d.sin_phase[i], d.cos_phase[i])
            m = D.then(S).then(R)
            comp = max(comp, abs(m.p - a[i]) + abs(m.q - b[i]))
    rho_dev = max(abs(r.rho_scaled_last - 1) for r in rho.values())
    ok = (mink.uniR_max > 1e3 and not mink.uniR_tends_to_zero and rho_dev < 0.05
          and not any(r.rho_limit_one for r in rho.values()) and comp < 1e-8)
    record(9, ok, f"Minkowski max uniR {mink.uniR_max:.3g} (>1e3), max |rho sqrt(l) - 1| at l=500 "
                  f"{rho_dev:.1e} (<0.05), composition err {comp:.1e} (<1e-8)")


def test_criterion_10_variance_asymptotics():
    lo = hi = None
    for kind, ts in (("gowdy_t3", (2.0, 5.0)), ("gowdy_s", (1.3, math.pi / 2, 1.9))):
        fam = ft.ModeFamily(kind)
        for t in ts:
            dq, dp = ft.field_coherent_variances(fam, ft.STANDARD, 500, 1.0, t)
            vals = (dq * math.sqrt(1000), dp * math.sqrt(2 / 500))
            lo = min(vals) if lo is None else min(lo, *vals)
            hi = max(vals) if hi is None else max(hi, *vals)
    mink = 0.0
    fam = ft.ModeFamily("minkowski")
    for ell in (1, 2, 7, 100, 500, 3000):
        for t in (-1.0, 0.5, 2.0):
            dq, dp = ft.field_coherent_variances(fam, ft.STANDARD, ell, 0.0, t)
            mink = max(mink, abs(dq * math.sqrt(2 * ell) - 1), abs(dp * math.sqrt(2 / ell) - 1))
    record(10, 0.95 <= lo and hi <= 1.05 and mink < 1e-12,
           f"Gowdy scaled variances in [{lo:.4f}, {hi:.4f}] (within [0.95, 1.05]), Minkowski dev {mink:.1e}")


def test_criterion_11_cli_determinism(tmp_path, monkeypatch):
    from tdho.cli import main
    monkeypatch.delenv("TDHO_WORKERS", raising=False)
    scen = os.path.join(os.path.dirname(__file__), "..", "demos", "scenarios")
    runs = [(["field", "unitarity"], os.path.join(scen, "gowdy_t3.json")),
            (["field", "factorize"], os.path.join(scen, "gowdy_s_factorize.json")),
            (["transition"], os.path.join(scen, "mathieu.json"))]
    fig = tmp_path / "fig.json"
    fig.write_text(json.dumps({"figures": [1, 2, 3], "num": 50}))
    runs.append((["figures"], str(fig)))
    same, files = True, 0
    for k, (cmd, sc) in enumerate(runs):
        outs = []
        for w in ("1", "4"):
            out = tmp_path / f"{k}-{w}"
            assert main(cmd + ["--scenario", sc, "--workers", w, "--out", str(out)]) == 0
            outs.append(out)
        for name in sorted(os.listdir(outs[0])):
            files += 1
            same &= (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    record(11, same, f"{files} files byte-identical across --workers 1 and 4")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
