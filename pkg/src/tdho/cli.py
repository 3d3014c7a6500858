"""Scenario-driven command line front end.

Every subcommand reads a JSON scenario, validates it against a schema that
rejects unknown keys, writes a CSV (and sometimes a JSON report) into the
output directory, and finishes with ``manifest.json`` recording versions,
tolerances and the outcome of each invariant check.

Exit codes: 0 ok, 2 usage, 3 numeric failure, 4 singularity, 5 a check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from importlib import metadata

import jsonschema
import numpy as np

from . import __version__
from . import field_theory as ft
from . import profiles
from .classical import DEFAULT_TOL, solve_fundamental
from .ermakov import EPQuadraticForm, ep_from_fundamental, ep_residual, fundamental_from_ep
from .errors import (CausticError, ContractError, DivergenceError, DomainError, NumericError,
                     SingularityError, TDHOError, UnsupportedError)
from .models import canonical_ep_solution, closed_form_pair, has_closed_form, pair_for
from .propagator import kernel, kernel_via_factorization
from .semiclassical import SemiclassicalState, expectations, uncertainties
from .transitions import amplitude_table, bogoliubov

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_SINGULAR, EXIT_CHECK = 0, 2, 3, 4, 5

WRONSKIAN_TOL = 1e-8
BOGOLIUBOV_TOL = 1e-10
PARITY_TOL = 1e-14
RHO_TOL = 1e-8


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# schemas

_NUM = {"type": "number"}
_GRID = {"oneOf": [
    {"type": "array", "items": _NUM, "minItems": 1},
    {"type": "object", "additionalProperties": False, "required": ["start", "stop", "num"],
     "properties": {"start": _NUM, "stop": _NUM, "num": {"type": "integer", "minimum": 1}}},
]}
_MODEL = {
    "type": "object", "required": ["kind"],
    "properties": {
        "kind": {"enum": list(profiles.MODEL_KINDS) + ["table"]},
        "kappa0": _NUM, "omega": _NUM, "a": _NUM, "b": _NUM,
        "interval": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "file": {"type": "string"},
        "t": {"type": "array", "items": _NUM}, "kappa": {"type": "array", "items": _NUM},
    },
    "additionalProperties": False,
}
_FORM = {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}
_FAMILY = {
    "type": "object", "required": ["kind"], "additionalProperties": False,
    "properties": {"kind": {"enum": list(ft.FAMILY_KINDS)},
                   "kappas": {"type": "array", "items": _NUM, "minItems": 1}},
}
_REP = {"type": "object", "additionalProperties": False,
        "properties": {"kind": {"enum": ["standard"]},
                       "gamma": {"type": "object", "additionalProperties": _NUM}}}


def _obj(required, **props):
    return {"type": "object", "required": required, "properties": props,
            "additionalProperties": False}


SCHEMAS = {
    "solve": _obj(["model", "t0", "times"], model=_MODEL, t0=_NUM, times=_GRID),
    "propagate": _obj(["model", "t0", "t", "q", "q0"], model=_MODEL, t0=_NUM, t=_NUM, q=_GRID,
                      q0=_GRID, ep_forms={"type": "array", "items": _FORM, "maxItems": 2}),
    "transition": _obj(["model", "t0", "t", "omega_in", "omega_out"], model=_MODEL, t0=_NUM,
                       t=_NUM, omega_in=_NUM, omega_out=_NUM,
                       n_in_max={"type": "integer", "minimum": 0, "maximum": 64},
                       n_out_max={"type": "integer", "minimum": 0, "maximum": 128}),
    "semiclassical": _obj(["model", "t0", "times"], model=_MODEL, t0=_NUM, times=_GRID,
                          q=_NUM, p=_NUM, ep_form=_FORM,
                          ep_choice={"enum": ["figure", "mode"]}),
    "models validate": _obj(["model", "t0", "times"], model=_MODEL, t0=_NUM, times=_GRID),
    "field unitarity": _obj(["family", "t0", "t", "L_schedule"], family=_FAMILY, rep=_REP,
                            t0=_NUM, t=_NUM,
                            L_schedule={"type": "array", "minItems": 1,
                                        "items": {"type": "integer", "minimum": 1}}),
    "field factorize": _obj(["family", "t0", "t", "L"], family=_FAMILY, rep=_REP, t0=_NUM,
                            t=_NUM, L={"type": "integer", "minimum": 1}),
    "field variances": _obj(["family", "t0", "ells"], family=_FAMILY, rep=_REP, t0=_NUM,
                            t=_NUM, times=_GRID,
                            ells={"type": "array", "minItems": 1,
                                  "items": {"type": "integer"}}),
    "figures": _obj([], figures={"type": "array", "items": {"enum": [1, 2, 3]}},
                    num={"type": "integer", "minimum": 2}),
}


def _grid(spec):
    if isinstance(spec, dict):
        return [float(x) for x in np.linspace(spec["start"], spec["stop"], spec["num"])]
    return [float(x) for x in spec]


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return format(float(x), ".17g")


def _clean(obj):
    """Plain JSON types with floats kept at full precision."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


class Run:
    """Collects artifacts and check outcomes for one invocation."""

    def __init__(self, command, scenario, out, tol):
        self.command = command
        self.scenario = scenario
        self.out = out
        self.tol = tol
        self.checks = {}
        self.files = []

    def check(self, name, value, threshold):
        value = float(value)
        prev = self.checks.get(name)
        if prev is not None:
            value = max(value, prev["value"])
        self.checks[name] = {"value": value, "threshold": threshold,
                             "pass": bool(value <= threshold)}

    def flag(self, name, ok, detail=None):
        self.checks[name] = {"pass": bool(ok)} | ({"detail": detail} if detail else {})

    def csv(self, name, header, rows):
        path = os.path.join(self.out, name)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(x) for x in r])
        self.files.append(name)

    def json(self, name, doc):
        path = os.path.join(self.out, name)
        with open(path, "w") as fh:
            json.dump(_clean(doc), fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.files.append(name)

    def manifest(self):
        doc = {
            "tool": "tdho",
            "command": self.command,
            "versions": {"tdho": __version__, "numpy": np.__version__,
                         "scipy": metadata.version("scipy")},
            "tolerances": {"integration": self.tol, "wronskian": WRONSKIAN_TOL,
                           "bogoliubov": BOGOLIUBOV_TOL, "parity": PARITY_TOL,
                           "rho_independence": RHO_TOL},
            "scenario": self.scenario,
            "checks": self.checks,
            "files": sorted(self.files),
            "passed": all(c["pass"] for c in self.checks.values()),
        }
        self.json("manifest.json", doc)
        return doc["passed"]


def _profile(doc, base_dir):
    return profiles.from_json(doc, base_dir)


def _wronskian(run, pair):
    run.check("wronskian", abs(pair.wronskian - 1.0), WRONSKIAN_TOL)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(run, sc, base_dir, workers):
    prof = _profile(sc["model"], base_dir)
    t0 = sc["t0"]
    rows = []
    for t in _grid(sc["times"]):
        p = solve_fundamental(prof, t0, t, run.tol)
        _wronskian(run, p)
        rows.append((t, p.c, p.s, p.c_dot, p.s_dot, p.wronskian - 1.0, p.index_s, p.index_c))
    run.csv("solve.csv", ["t", "c", "s", "c_dot", "s_dot", "wronskian_defect", "zeros_s",
                          "zeros_c"], rows)


def cmd_propagate(run, sc, base_dir, workers):
    prof = _profile(sc["model"], base_dir)
    t0, t = sc["t0"], sc["t"]
    pair = pair_for(prof, t0, t, run.tol)
    _wronskian(run, pair)
    qs, q0s = _grid(sc["q"]), _grid(sc["q0"])
    eps = [ep_from_fundamental(EPQuadraticForm.normalized(*f), prof, t0)
           for f in sc.get("ep_forms", [])]
    rows = []
    for q in qs:
        for q0 in q0s:
            k = kernel(pair, pair.index_s, q, q0)
            rows.append((q, q0, k.real, k.imag))
            for ep in eps:
                kf = kernel_via_factorization(ep, t0, t, q, q0)
                run.check("rho_independence", abs(kf - k) / max(1.0, abs(k)), RHO_TOL)
    run.csv("kernel.csv", ["q", "q0", "re", "im"], rows)


def cmd_transition(run, sc, base_dir, workers):
    prof = _profile(sc["model"], base_dir)
    t0, t = sc["t0"], sc["t"]
    w1, w2 = sc["omega_in"], sc["omega_out"]
    n1max, n2max = sc.get("n_in_max", 4), sc.get("n_out_max", 4)
    pair = pair_for(prof, t0, t, run.tol)
    _wronskian(run, pair)
    for w in sorted({w1, w2}):
        run.check("bogoliubov", abs(bogoliubov(pair, w).defect), BOGOLIUBOV_TOL)
    tab = amplitude_table(pair, pair.index_s, w1, n1max, w2, n2max, pair.index_c)
    rows = []
    parity = 0.0
    for (a, b), v in sorted(tab.entries.items()):
        rows.append((a, b, v.real, v.imag, abs(v) ** 2))
        if (a + b) % 2:
            parity = max(parity, abs(v))
    run.check("parity_zeros", parity, PARITY_TOL)
    run.csv("amplitudes.csv", ["n_in", "n_out", "re", "im", "prob"], rows)
    run.json("row_norms.json", {str(a): tab.row_norm(a) for a in range(n1max + 1)})


def _semiclassical_ep(prof, sc, t0):
    if "ep_form" in sc:
        return ep_from_fundamental(EPQuadraticForm.normalized(*sc["ep_form"]), prof, t0)
    if prof.model is None or not has_closed_form(prof.model):
        raise UsageError("this model needs an explicit ep_form")
    return canonical_ep_solution(prof.model, t0, sc.get("ep_choice", "figure"))


def cmd_semiclassical(run, sc, base_dir, workers):
    prof = _profile(sc["model"], base_dir)
    t0 = sc["t0"]
    ep = _semiclassical_ep(prof, sc, t0)
    state = SemiclassicalState.from_cauchy(ep, t0, sc.get("q", 1.0), sc.get("p", 0.0))
    q0, p0 = state.cauchy_data()
    rows = []
    for t in _grid(sc["times"]):
        mq, mp = expectations(state, t)
        pair = pair_for(prof, t0, t, run.tol)
        cq, cp = pair.flow(q0, p0)
        run.check("ehrenfest", max(abs(mq - cq), abs(mp - cp)) / max(1.0, abs(cq), abs(cp)),
                  1e-8)
        u = uncertainties(ep, t)
        r, rd = ep.values(t)
        run.check("uncertainty_product", abs(u.product - 0.5 * math.sqrt(1 + (r * rd) ** 2)),
                  1e-10)
        rows.append((t, mq, mp, cq, cp, u.dq, u.dp, u.product))
    run.csv("semiclassical.csv", ["t", "mean_q", "mean_p", "classical_q", "classical_p", "dq",
                                  "dp", "product"], rows)


def cmd_models_validate(run, sc, base_dir, workers):
    prof = _profile(sc["model"], base_dir)
    t0 = sc["t0"]
    closed = prof.model is not None and has_closed_form(prof.model)
    rows = []
    for t in _grid(sc["times"]):
        p = solve_fundamental(prof, t0, t, run.tol)
        _wronskian(run, p)
        diff = None
        if closed:
            q = closed_form_pair(prof.model, t0, t)
            diff = max(abs(p.c - q.c), abs(p.s - q.s), abs(p.c_dot - q.c_dot),
                       abs(p.s_dot - q.s_dot))
            run.check("closed_form", diff, 1e-8)
        rows.append((t, p.c, p.s, p.wronskian - 1.0, diff))
    if closed and (prof.model.kappa0 is None or prof.model.kappa0 > 0):
        ep = canonical_ep_solution(prof.model, t0)
        for t in _grid(sc["times"]):
            if t != t0:
                run.check("ep_residual", ep_residual(ep, t), 1e-6)
                f = fundamental_from_ep(ep, t0, t)
                p = pair_for(prof, t0, t, run.tol)
                run.check("ep_round_trip", max(abs(f.c - p.c), abs(f.s - p.s)), 1e-6)
    run.csv("validate.csv", ["t", "c", "s", "wronskian_defect", "closed_form_diff"], rows)


def _family(sc):
    fam = sc["family"]
    return ft.ModeFamily(fam["kind"], tuple(fam.get("kappas", ())))


def _rep(sc):
    rep = sc.get("rep", {})
    gamma = rep.get("gamma")
    if gamma:
        table = {int(k): float(v) for k, v in gamma.items()}
        return ft.RepresentationSeq(gamma=lambda ell, tb=table: tb.get(abs(ell), 0.0))
    return ft.STANDARD


def cmd_field_unitarity(run, sc, base_dir, workers):
    fam, rep = _family(sc), _rep(sc)
    report = ft.unitarity_test(fam, rep, sc["t0"], sc["t"], sc["L_schedule"], workers)
    run.check("bogoliubov", report.max_defect, BOGOLIUBOV_TOL)
    cums = np.cumsum(report.terms)
    run.csv("unitarity.csv", ["ell", "abs_B2", "partial_sum"],
            [(i + 1, report.terms[i], cums[i]) for i in range(len(report.terms))])
    run.json("truncation_report.json", report.to_dict())


def cmd_field_factorize(run, sc, base_dir, workers):
    fam, rep = _family(sc), _rep(sc)
    t0, t, L = sc["t0"], sc["t"], sc["L"]
    rep_ = ft.factorization_obstruction(fam, rep, t0, t, L, workers=workers)
    d = ft.mode_ep_data(fam, t0, t, L, workers=workers)
    ells, A, B = ft.mode_bogoliubov_sweep(fam, rep, t0, t, L, workers)
    al, be = rep.arrays(fam, ells)
    rows, worst = [], 0.0
    for i, ell in enumerate(ells):
        blocks = ft.block_maps(al[i], be[i], d.rho0[i], d.rho_dot0[i], d.rho[i], d.rho_dot[i],
                               d.sin_phase[i], d.cos_phase[i])
        m = blocks[0].then(blocks[1]).then(blocks[2])
        err = abs(m.p - A[i]) + abs(m.q - B[i])
        worst = max(worst, err)
        rows.append((ell, rep_.uniT_terms[i], rep_.uniR_terms[i], d.rho[i] * math.sqrt(ell),
                     err))
    run.check("composition", worst, 1e-8)
    run.csv("factorize.csv", ["ell", "uniT_term", "uniR_term", "rho_sqrt_ell",
                              "composition_error"], rows)
    run.json("obstruction_report.json", rep_.to_dict())


def cmd_field_variances(run, sc, base_dir, workers):
    fam, rep = _family(sc), _rep(sc)
    t0 = sc["t0"]
    if "times" in sc:
        times = _grid(sc["times"])
    elif "t" in sc:
        times = [sc["t"]]
    else:
        raise UsageError("field variances needs 't' or 'times'")
    rows = []
    for ell in sorted(sc["ells"]):
        w = fam.frequency(ell)
        for t in times:
            dq, dp = ft.field_coherent_variances(fam, rep, ell, t0, t)
            rows.append((ell, t, dq, dp, dq * math.sqrt(2 * w), dp * math.sqrt(2 / w)))
    run.csv("variances.csv", ["ell", "t", "dq", "dp", "dq_scaled", "dp_scaled"], rows)


def cmd_figures(run, sc, base_dir, workers):
    figs = sc.get("figures", [1, 2, 3])
    num = sc.get("num", 400)
    if 1 in figs:
        ep = canonical_ep_solution(profiles.gowdy_t3(1.0).model, 1.0)
        rows = []
        for t in np.geomspace(1e-8, 60.0, num):
            u = uncertainties(ep, float(t))
            rows.append((t, u.dq, u.dp, u.product))
        run.csv("fig1.csv", ["t", "dq", "dp", "product"], rows)
    if 2 in figs:
        # omega' = sqrt(1 + 4 omega^2) = 5
        ep = canonical_ep_solution(profiles.gowdy_s(math.sqrt(6.0)).model, math.pi / 2)
        rows = []
        for t in np.linspace(0.02, math.pi - 0.02, num):
            u = uncertainties(ep, float(t))
            rows.append((t, u.dq, u.dp, u.product))
        run.csv("fig2.csv", ["t", "dq", "dp", "product"], rows)
    if 3 in figs:
        fam = ft.ModeFamily("gowdy_s")
        t0 = 0.5
        rows = []
        for ell in (10, 50, 200, 1000):
            for t in np.linspace(t0 + 0.01, math.pi - 0.01, num):
                dq, dp = ft.field_coherent_variances(fam, ft.STANDARD, ell, t0, float(t))
                rows.append((ell, t, dq * math.sqrt(2 * ell), dp * math.sqrt(2 / ell)))
        run.csv("fig3.csv", ["ell", "t", "dq_scaled", "dp_scaled"], rows)


COMMANDS = {
    "solve": cmd_solve,
    "propagate": cmd_propagate,
    "transition": cmd_transition,
    "semiclassical": cmd_semiclassical,
    "models validate": cmd_models_validate,
    "field unitarity": cmd_field_unitarity,
    "field factorize": cmd_field_factorize,
    "field variances": cmd_field_variances,
    "figures": cmd_figures,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS lets the flags appear before or after the subcommand
    sup = argparse.SUPPRESS
    common.add_argument("--scenario", default=sup, help="scenario JSON file")
    common.add_argument("--tol", type=float, default=sup, help="integration tolerance")
    common.add_argument("--workers", type=int, default=sup,
                        help="worker processes for mode sweeps (TDHO_WORKERS overrides)")
    common.add_argument("--out", default=sup, help="output directory")
    p = argparse.ArgumentParser(prog="tdho", parents=[common],
                                description="Time-dependent harmonic oscillator toolkit.")
    p.add_argument("--version", action="version", version=f"tdho {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "propagate", "transition", "semiclassical"):
        sub.add_parser(name, parents=[common])
    sub.add_parser("figures", parents=[common])
    models = sub.add_parser("models", parents=[common])
    models.add_subparsers(dest="action", required=True).add_parser("validate", parents=[common])
    field_ = sub.add_parser("field", parents=[common])
    fs = field_.add_subparsers(dest="action", required=True)
    for name in ("unitarity", "factorize", "variances"):
        fs.add_parser(name, parents=[common])
    return p


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    command = ns.command + (f" {ns.action}" if getattr(ns, "action", None) else "")
    tol = getattr(ns, "tol", DEFAULT_TOL)
    out = getattr(ns, "out", ".")
    workers = getattr(ns, "workers", None)
    scenario_path = getattr(ns, "scenario", None)
    try:
        if scenario_path is None:
            if command != "figures":
                raise UsageError(f"{command} needs --scenario")
            scenario, base_dir = {}, "."
        else:
            with open(scenario_path) as fh:
                scenario = json.load(fh)
            base_dir = os.path.dirname(os.path.abspath(scenario_path))
        jsonschema.validate(scenario, SCHEMAS[command])
        if not tol > 0:
            raise UsageError("--tol must be positive")
        os.makedirs(out, exist_ok=True)
        run = Run(command, scenario, out, tol)
        COMMANDS[command](run, scenario, base_dir, workers)
        passed = run.manifest()
    except (UsageError, jsonschema.ValidationError, json.JSONDecodeError, OSError,
            ContractError, DomainError, UnsupportedError) as e:
        msg = e.message if isinstance(e, jsonschema.ValidationError) else str(e)
        print(f"tdho: usage error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularityError, CausticError) as e:
        where = f" (last time {e.last_time})" if getattr(e, "last_time", None) else ""
        print(f"tdho: singularity: {e}{where}", file=sys.stderr)
        return EXIT_SINGULAR
    except (NumericError, DivergenceError, TDHOError, ArithmeticError) as e:
        print(f"tdho: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    if not passed:
        failed = sorted(k for k, v in run.checks.items() if not v["pass"])
        print(f"tdho: invariant checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
