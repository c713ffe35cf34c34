"""Command-line entry point: ``halfchain <subcommand> [--config PATH] [--out DIR] ...``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical invariant violated.
Every run writes ``resolved_config.json`` (defaults filled) and a separate
``metadata.json`` holding timestamps and environment details, so the other
artifacts are byte-identical across runs with the same resolved config.
"""

from __future__ import annotations

import argparse
import copy
import datetime
import json
import os
import platform
import sys
from pathlib import Path

import jsonschema
import numpy as np

from halfchain import __version__
from halfchain import criteria as crit
from halfchain.core import BoundaryCondition, CapExceeded, Window
from halfchain.correspondence import (FiniteLSS, FiniteSpecification, check_roundtrips,
                                      check_specification_consistency, map_b, random_lss_pair,
                                      window_intervals)
from halfchain.couplings import Hierarchical, IsingPotential, PowerLaw, PowerLog
from halfchain.io import write_csv, write_json
from halfchain.kernels import ExteriorSpec, gibbs_kernel
from halfchain.probe import PROBE_COLUMNS, MCMCParams, ProbeConfig, bc_gap_scan
from halfchain.sensitivity import (AnalyticBound, ExhaustiveTails, ExtremalTails,
                                   sensitivity_row)

EXIT_OK, EXIT_INVALID, EXIT_INVARIANT = 0, 2, 3
TOL = 1e-10

PER_SITE = ("cff", "harris_stenflo", "boundary_uniformity", "johansson_oberg",
            "one_sided_dobrushin")
GLOBAL = ("uniq_cond", "phtr_cond", "kac_thompson", "hierarchical")

_int_site = {"type": "integer", "maximum": 0}
_model_schema = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["type", "p"],
         "properties": {"type": {"const": "power_law"}, "p": {"type": "number"}}},
        {"type": "object", "additionalProperties": False, "required": ["type", "s"],
         "properties": {"type": {"const": "power_log"}, "s": {"type": "number"},
                        "t": {"type": "number", "minimum": 0}}},
        {"type": "object", "additionalProperties": False, "required": ["type"],
         "anyOf": [{"required": ["alpha"]}, {"required": ["b"]}],
         "properties": {"type": {"const": "hierarchical"}, "alpha": {"type": "number"},
                        "b": {"type": "array", "items": {"type": "number", "minimum": 0},
                              "minItems": 1}}},
        {"type": "object", "additionalProperties": False, "required": ["type", "entries"],
         "properties": {"type": {"const": "table"},
                        "entries": {"type": "array", "items": {
                            "type": "array", "minItems": 3, "maxItems": 3,
                            "prefixItems": [_int_site, _int_site, {"type": "number"}]}}}},
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version"],
    "properties": {
        "schema_version": {"const": 1},
        "model": _model_schema,
        "beta_grid": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
        "bc": {"oneOf": [
            {"enum": ["all_plus", "all_minus", "free"]},
            {"type": "object", "additionalProperties": False, "required": ["periodic"],
             "properties": {"periodic": {"type": "array", "minItems": 1,
                                         "items": {"enum": [-1, 1]}}}}]},
        "cap": {"type": "integer", "minimum": 1, "maximum": 30},
        "depth": {"type": ["integer", "null"], "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "window": {"type": "object", "additionalProperties": False,
                   "properties": {"ls": _int_site, "l": _int_site}},
        "sites": {"type": "array", "items": _int_site, "minItems": 1},
        "criteria": {"type": "array", "items": {"enum": list(PER_SITE + GLOBAL + ("regime",))}},
        "C_grid": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
        "sensitivity": {"type": "object", "additionalProperties": False,
                        "properties": {"i": _int_site, "lags": {"type": "integer", "minimum": 1},
                                       "method": {"enum": ["extremal", "exhaustive", "bound"]},
                                       "depth": {"type": "integer", "minimum": 1}}},
        "correspondence": {"type": "object", "additionalProperties": False,
                           "properties": {"q": {"enum": [2, 3, 4]},
                                          "instances": {"type": "integer", "minimum": 0}}},
        "probe": {"type": "object", "additionalProperties": False,
                  "properties": {"mode": {"enum": ["exact", "mcmc"]},
                                 "volumes": {"type": "array", "minItems": 1,
                                             "items": {"type": "integer", "minimum": 1}},
                                 "sweeps": {"type": "integer", "minimum": 1},
                                 "burn_in": {"type": "integer", "minimum": 0},
                                 "replicas": {"type": "integer", "minimum": 1}}},
    },
}

DEFAULTS = {
    "schema_version": 1,
    "model": {"type": "power_law", "p": 2.5},
    "beta_grid": [1.0],
    "bc": "all_plus",
    "cap": 24,
    "depth": None,
    "seed": 0,
    "window": {"ls": -5, "l": -3},
    "sites": list(crit.DEFAULT_SITES),
    "criteria": list(PER_SITE + GLOBAL + ("regime",)),
    "C_grid": list(crit.DEFAULT_C_GRID),
    "sensitivity": {"i": 0, "lags": 6, "method": "extremal", "depth": 6},
    "correspondence": {"q": 3, "instances": 5},
    "probe": {"mode": "exact", "volumes": [4, 8, 12], "sweeps": 100_000, "burn_in": 1_000,
              "replicas": 8},
}


class ConfigError(ValueError):
    pass


def resolve_config(raw: dict | None, flags) -> dict:
    raw = raw if raw is not None else {"schema_version": 1}
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from None
    cfg = copy.deepcopy(DEFAULTS)
    for key, val in raw.items():
        if isinstance(val, dict) and isinstance(cfg.get(key), dict) and key != "model":
            cfg[key].update(val)
        else:
            cfg[key] = val
    for name in ("seed", "cap", "depth"):
        v = getattr(flags, name, None)
        if v is not None:
            cfg[name] = v
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from None
    return cfg


def build_model(cfg: dict):
    spec = cfg["model"]
    if spec["type"] == "power_law" and spec["p"] <= 1:
        raise ConfigError(f"power_law(p={spec['p']:g}): sum of r**-p diverges for p <= 1, "
                          "the model is not well defined")
    try:
        return crit.parse_model(cfg["model"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_bc(cfg: dict) -> BoundaryCondition:
    bc = cfg["bc"]
    if isinstance(bc, dict):
        return BoundaryCondition.periodic(tuple(bc["periodic"]))
    return BoundaryCondition(bc)


def require_summable(model):
    if not model.summable():
        raise ConfigError(f"{model.label()}: couplings are not summable, "
                          "the model is not well defined")


# subcommands: each returns (report, {csv name: (rows, columns)}, ok)

def cmd_kernel(cfg, flags):
    model = build_model(cfg)
    require_summable(model)
    bc = build_bc(cfg)
    window = Window(cfg["window"]["l"], 0)
    reports, tables, rows = [], {}, []
    for beta in cfg["beta_grid"]:
        pot = IsingPotential(model, beta)
        t = gibbs_kernel(pot, window, ExteriorSpec(bc, cfg["depth"]), cap=cfg["cap"])
        ok = abs(t.probs.sum() - 1) <= 1e-12 and t.probs.min() > 0
        reports.append({"beta": beta, "window": str(window), "logZ": t.logZ, "D": t.depth,
                        "epsD": t.eps, "normalization_ok": bool(ok)})
        for cfg_, lw, p in zip(t.configs(), t.log_weights, t.probs):
            rows.append({"beta": beta, "config": cfg_.to_string(), "logweight": lw, "prob": p})
    tables["kernel.csv"] = (rows, ("beta", "config", "logweight", "prob"))
    ok = all(r["normalization_ok"] for r in reports)
    return {"kernels": reports, "model": model.label(), "bc": str(bc)}, tables, ok


def cmd_correspondence(cfg, flags):
    model = build_model(cfg)
    require_summable(model)
    bc = build_bc(cfg)
    ls = cfg["window"]["ls"]
    ext = ExteriorSpec(bc, cfg["depth"])
    intervals = [tuple(range(l, m + 1)) for l, m in window_intervals(ls)]
    whole = tuple(range(ls, 1))
    defects = []
    for beta in cfg["beta_grid"]:
        pot = IsingPotential(model, beta)
        f = FiniteLSS.from_potential(pot, ls, ext)
        g = FiniteSpecification.from_potential(pot, ls, ext)
        d_cb, d_bc = check_roundtrips(f, g)
        cons = max(check_specification_consistency(g, lam, whole) for lam in intervals)
        gb = map_b(f)
        cross = 0.0
        for sites in intervals:
            omega = np.ones(1 - ls, dtype=np.int64)
            cross = max(cross, float(np.abs(gb.kernel(sites, omega) - g.kernel(sites, omega)).max()))
        defects.append({"source": "ising", "beta": beta, "roundtrip_cb": d_cb,
                        "roundtrip_bc": d_bc, "consistency": cons, "b_vs_gibbs": cross})
    q = cfg["correspondence"]["q"]
    for n in range(cfg["correspondence"]["instances"]):
        f = random_lss_pair(ls, q, cfg["seed"] + n)
        gb = map_b(f)
        d_cb, d_bc = check_roundtrips(f, gb)
        cons = max(check_specification_consistency(gb, lam, whole) for lam in intervals)
        defects.append({"source": f"random_lss(q={q},seed={cfg['seed'] + n})", "roundtrip_cb": d_cb,
                        "roundtrip_bc": d_bc, "consistency": cons})
    keys = ("roundtrip_cb", "roundtrip_bc", "consistency", "b_vs_gibbs")
    ok = all(d[k] <= TOL for d in defects for k in keys if k in d)
    report = {"window": f"[{ls},0]", "defects": defects, "tolerances": {k: TOL for k in keys},
              "pass": ok,
              "scope": "kernel-level identities on a finite window; measure-level statements "
                       "are not checked"}
    return report, {}, ok


def _method(cfg):
    s = cfg["sensitivity"]
    return {"extremal": ExtremalTails(), "exhaustive": ExhaustiveTails(s["depth"]),
            "bound": AnalyticBound()}[s["method"]]


def cmd_sensitivity(cfg, flags):
    model = build_model(cfg)
    require_summable(model)
    s = cfg["sensitivity"]
    rows, ok = [], True
    for beta in cfg["beta_grid"]:
        pot = IsingPotential(model, beta)
        for n in range(1, s["lags"] + 1):
            r = sensitivity_row(pot, s["i"], s["i"] - n, _method(cfg))
            d = r.as_dict()
            d["beta"] = beta
            rows.append(d)
            if not isinstance(_method(cfg), AnalyticBound):
                ok &= r.osc <= r.var + 1e-15
                ok &= abs(r.a - (1 - r.var)) <= 1e-12 and abs(r.b - (1 - r.var)) <= 1e-12
                ok &= r.var <= r.var_bound + 1e-12
    cols = ("beta", "i", "k", "var", "osc", "a", "b", "method", "var_bound", "osc_bound")
    return {"model": model.label(), "rows": len(rows), "invariants_ok": bool(ok)}, \
        {"sensitivity.csv": (rows, cols)}, bool(ok)


def cmd_criteria(cfg, flags):
    model = build_model(cfg)
    require_summable(model)
    chosen = cfg["criteria"]
    reports = []
    per_site = {"cff": crit.cff, "harris_stenflo": crit.harris_stenflo,
                "boundary_uniformity": crit.boundary_uniformity_series,
                "johansson_oberg": crit.johansson_oberg,
                "one_sided_dobrushin": crit.one_sided_dobrushin}
    for beta in cfg["beta_grid"]:
        pot = IsingPotential(model, beta)
        for i in cfg["sites"]:
            for name in PER_SITE:
                if name in chosen:
                    reports.append(per_site[name](pot, i).as_dict())
    if "uniq_cond" in chosen:
        reports.append(crit.ising_uniqueness_condition(model, tuple(cfg["C_grid"])).as_dict())
    if "phtr_cond" in chosen:
        reports.append(crit.dyson_transition_condition(model).as_dict())
    if "kac_thompson" in chosen:
        reports.append(crit.kac_thompson(model).as_dict())
    if "hierarchical" in chosen and isinstance(model, Hierarchical):
        reports.append(crit.hierarchical_sums(model)[2].as_dict())
    regime = crit.regime_report(model)
    summary = [{"model": model.label(), "verdict": regime.verdict, "flags": ";".join(regime.flags)}]
    if "regime" in chosen:
        reports.append(regime.as_dict())
    return {"criteria": reports}, {"regimes.csv": (summary, ("model", "verdict", "flags"))}, True


def cmd_probe(cfg, flags):
    model = build_model(cfg)
    require_summable(model)
    p = cfg["probe"]
    params = MCMCParams(p["sweeps"], p["burn_in"], p["replicas"], cfg["seed"],
                        getattr(flags, "threads", None) or 1)
    pc = ProbeConfig(model, tuple(cfg["beta_grid"]), tuple(p["volumes"]), cfg["depth"],
                     p["mode"], params, cfg["cap"])
    rows = bc_gap_scan(pc)
    ok = True
    if p["mode"] == "exact" and model.ferromagnetic:
        ok = all(r["gap"] >= -1e-12 for r in rows)
    return {"model": model.label(), "rows": len(rows), "invariants_ok": ok}, \
        {"probe.csv": (rows, PROBE_COLUMNS)}, ok


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def regime_models_from_flags(flags):
    if not flags.model:
        return crit.default_regime_models()
    out = []
    if flags.model == "power_law":
        for p in _floats(flags.p or ""):
            out.append(("power_law", f"p={p:g}", PowerLaw(p) if p > 1 else None))
    elif flags.model == "hierarchical":
        for a in _floats(flags.alpha or ""):
            out.append(("hierarchical", f"alpha={a:g}", Hierarchical(alpha=a)))
    elif flags.model == "power_log":
        s_vals = _floats(flags.s or "2")
        t_vals = _floats(flags.t or "1")
        for s in s_vals:
            for t in t_vals:
                out.append(("power_log", f"s={s:g},t={t:g}", PowerLog(s, t)))
    else:
        raise ConfigError(f"unknown model {flags.model!r}")
    if not out:
        raise ConfigError("no parameter values given")
    return out


REGIME_COLUMNS = ("model", "parameter", "verdict", "flags")


def cmd_regimes(cfg, flags):
    rows = crit.regimes_table(regime_models_from_flags(flags))
    sys.stdout.write(",".join(REGIME_COLUMNS) + "\n")
    for r in rows:
        sys.stdout.write(",".join(f'"{r[c]}"' if "," in str(r[c]) else str(r[c])
                                  for c in REGIME_COLUMNS) + "\n")
    return {"regimes": rows}, {"regimes.csv": (rows, REGIME_COLUMNS)}, True


def selftest_checks() -> dict:
    """The beta = 0 suite: every trivial identity must hold."""
    from halfchain.kernels import lss_singleton
    from halfchain.probe import exact_magnetization

    pot = IsingPotential(PowerLaw(2.0), 0.0)
    ext = ExteriorSpec(BoundaryCondition.all_plus(), 64)
    checks = {}
    t = gibbs_kernel(pot, Window(-4, 0), ext)
    checks["uniform_kernel"] = float(np.abs(t.probs - 2.0**-5).max()) <= 1e-15
    checks["lss_half"] = abs(lss_singleton(pot, -2, 1, None, ext) - 0.5) <= 1e-15
    r = sensitivity_row(pot, 0, -3, ExtremalTails())
    checks["var_zero"] = r.var == 0 and r.osc == 0
    checks["a_b_one"] = abs(r.a - 1) <= 1e-15 and abs(r.b - 1) <= 1e-15
    checks["magnetization_zero"] = abs(exact_magnetization(pot, 6, BoundaryCondition.all_plus(), 64)) <= 1e-14
    f = FiniteLSS.from_potential(pot, -3, ext)
    g = FiniteSpecification.from_potential(pot, -3, ext)
    d_cb, d_bc = check_roundtrips(f, g)
    checks["roundtrips"] = d_cb <= 1e-14 and d_bc <= 1e-14
    checks["cff_diverges"] = crit.cff(pot, 0).verdict == crit.UNIQUE
    return checks


def cmd_selftest(cfg, flags):
    checks = selftest_checks()
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    ok = all(checks.values())
    return {"selftest": checks, "pass": ok}, {}, ok


COMMANDS = {"kernel": cmd_kernel, "correspondence-check": cmd_correspondence,
            "sensitivity": cmd_sensitivity, "criteria": cmd_criteria, "phase-probe": cmd_probe,
            "regimes": cmd_regimes, "selftest": cmd_selftest}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--out", type=Path, default=Path("halfchain-out"), help="output directory")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int)
    common.add_argument("--cap", type=int)
    common.add_argument("--depth", type=int)
    parser = argparse.ArgumentParser(prog="halfchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "regimes":
            sp.add_argument("--model", choices=["power_law", "hierarchical", "power_log"])
            sp.add_argument("--p", help="comma-separated exponents")
            sp.add_argument("--alpha", help="comma-separated hierarchical exponents")
            sp.add_argument("--s", help="comma-separated power_log exponents")
            sp.add_argument("--t", help="comma-separated power_log log-exponents")
    return parser


def run(argv=None) -> int:
    parser = make_parser()
    flags = parser.parse_args(argv)
    try:
        raw = None
        if flags.config is not None:
            try:
                raw = json.loads(flags.config.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        cfg = resolve_config(raw, flags)
        report, tables, ok = COMMANDS[flags.command](cfg, flags)
    except crit.VerdictContradiction as exc:
        print(f"halfchain: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, CapExceeded, ValueError) as exc:
        print(f"halfchain: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = flags.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "resolved_config.json", cfg)
    write_json(out / "report.json", {"command": flags.command, "report": report, "ok": ok})
    for name, (rows, cols) in tables.items():
        write_csv(out / name, rows, cols)
    write_json(out / "metadata.json", {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "version": __version__, "python": platform.python_version(),
        "argv": list(argv if argv is not None else sys.argv[1:]), "threads": flags.threads})
    if not ok:
        print(f"halfchain: numerical invariant violated in {flags.command}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
