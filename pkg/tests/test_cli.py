import json
import subprocess
import sys
from pathlib import Path

import pytest

from halfchain import cli

GOLDEN = Path(__file__).parent / "golden" / "regimes.csv"

SMALL = {"schema_version": 1, "model": {"type": "power_law", "p": 2.5}, "beta_grid": [0.5, 1.5],
         "window": {"ls": -3, "l": -2}, "sites": [0, -2], "criteria": ["cff", "uniq_cond", "regime"],
         "sensitivity": {"lags": 3}, "correspondence": {"q": 2, "instances": 2},
         "probe": {"volumes": [2, 4]}}


def run_with(tmp_path, sub, config=None, extra=(), name="out"):
    args = [sub, "--out", str(tmp_path / name)]
    if config is not None:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    return cli.run(args + list(extra)), tmp_path / name


def payload(out):
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name != "metadata.json"}


@pytest.mark.parametrize("sub", ["kernel", "correspondence-check", "sensitivity", "criteria",
                                 "phase-probe"])
def test_subcommands_run_and_are_reproducible(tmp_path, sub):
    code1, out1 = run_with(tmp_path, sub, SMALL, name="a")
    code2, out2 = run_with(tmp_path, sub, SMALL, name="b")
    assert code1 == code2 == 0
    assert payload(out1) == payload(out2)
    resolved = json.loads((out1 / "resolved_config.json").read_text())
    assert resolved["cap"] == 24 and resolved["sensitivity"]["method"] == "extremal"
    assert "timestamp" in json.loads((out1 / "metadata.json").read_text())


def test_csv_columns(tmp_path):
    _, out = run_with(tmp_path, "sensitivity", SMALL)
    head = (out / "sensitivity.csv").read_text().splitlines()[0]
    assert head == "beta,i,k,var,osc,a,b,method,var_bound,osc_bound"
    _, out = run_with(tmp_path, "phase-probe", SMALL, name="p")
    assert (out / "probe.csv").read_text().splitlines()[0].split(",") == list(cli.PROBE_COLUMNS)


def test_floats_have_17_digits(tmp_path):
    _, out = run_with(tmp_path, "kernel", SMALL)
    row = (out / "kernel.csv").read_text().splitlines()[1].split(",")
    assert float(row[3]) > 0 and len(row[3].replace("0.", "").lstrip("0")) >= 15


def test_correspondence_report(tmp_path):
    _, out = run_with(tmp_path, "correspondence-check", SMALL)
    rep = json.loads((out / "report.json").read_text())["report"]
    assert set(rep) >= {"window", "defects", "tolerances", "pass"} and rep["pass"]


def test_regimes_flags(tmp_path, capsys):
    code, out = run_with(tmp_path, "regimes", extra=["--model", "power_law", "--p", "1.2,1.5,1.8,2.5,3"])
    assert code == 0
    verdicts = [l.split(",")[2] for l in (out / "regimes.csv").read_text().splitlines()[1:]]
    assert verdicts == ["TransitionAtLowTemp"] * 3 + ["UniquenessCertified"] * 2
    assert "p=1.8" in capsys.readouterr().out


def test_regimes_default_matches_golden(tmp_path):
    code, out = run_with(tmp_path, "regimes")
    assert code == 0 and (out / "regimes.csv").read_text() == GOLDEN.read_text()


def test_regimes_other_models(tmp_path):
    code, out = run_with(tmp_path, "regimes", extra=["--model", "hierarchical", "--alpha", "0.8,2.5"])
    text = (out / "regimes.csv").read_text()
    assert code == 0 and "AssumptionViolated" in text and "UniquenessCertified" in text
    code, _ = run_with(tmp_path, "regimes", extra=["--model", "power_law"], name="empty")
    assert code == 2


def test_not_well_defined(tmp_path, capsys):
    cfg = dict(SMALL, model={"type": "power_law", "p": 0.5})
    code, _ = run_with(tmp_path, "criteria", cfg)
    assert code == 2
    assert "not well defined" in capsys.readouterr().err


@pytest.mark.parametrize("bad", [
    {"schema_version": 2},
    {"schema_version": 1, "unknown": 1},
    {"schema_version": 1, "beta_grid": [-1.0]},
    {"schema_version": 1, "model": {"type": "power_law"}},
    {"schema_version": 1, "sensitivity": {"extra": 1}},
])
def test_schema_rejections(tmp_path, bad):
    code, out = run_with(tmp_path, "kernel", bad)
    assert code == 2 and not out.exists()


def test_unreadable_config(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{not json")
    assert cli.run(["kernel", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_flag_overrides(tmp_path):
    _, out = run_with(tmp_path, "kernel", SMALL, extra=["--depth", "128", "--seed", "5"])
    resolved = json.loads((out / "resolved_config.json").read_text())
    assert resolved["depth"] == 128 and resolved["seed"] == 5
    assert json.loads((out / "report.json").read_text())["report"]["kernels"][0]["D"] == 128


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "TOL", -1.0)
    code, out = run_with(tmp_path, "correspondence-check", SMALL)
    assert code == 3 and (out / "report.json").exists()


def test_selftest_module_entry(tmp_path):
    res = subprocess.run([sys.executable, "-m", "halfchain", "selftest", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "FAIL" not in res.stdout and res.stdout.count("PASS") == 7
