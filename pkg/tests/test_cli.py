import json
import math
import subprocess
import sys

import pytest

from brmeans import io as bio
from brmeans.cli import ExperimentConfig, main, run
from brmeans.errors import ConfigError


def run_cli(tmp_path, command, *args, config=None):
    argv = [command, "--out", str(tmp_path / command)]
    if config is not None:
        tmp_path.mkdir(parents=True, exist_ok=True)
        cfg = tmp_path / f"{command}.json"
        cfg.write_text(json.dumps(config))
        argv += ["--config", str(cfg)]
    return main(argv + list(args)), tmp_path / command


def rows_of(path):
    return bio.read_csv(path)[2]


# -- kernel -------------------------------------------------------------------------------

def test_kernel_tables(tmp_path):
    code, out = run_cli(tmp_path, "kernel", "--n", "1,2", "--beta", "2", "--delta", "1")
    assert code == 0
    # [TRIVIAL] n = 1: only c_0 = 1 is nonzero
    r1 = {int(k): float(v) for k, v in rows_of(out / "kernel_coeffs_2_1_1.csv")}
    assert r1[0] == 1.0 and all(v == 0.0 for k, v in r1.items() if k != 0)
    # [DERIVED] n = 2: (0, 1), (+-1, 0.75), (+-2, 0)
    r2 = {int(k): float(v) for k, v in rows_of(out / "kernel_coeffs_2_1_2.csv")}
    assert r2 == {-2: 0.0, -1: 0.75, 0: 1.0, 1: 0.75, 2: 0.0}


def test_kernel_rejects_nonpositive_delta(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "kernel", "--delta", "0")  # [TRIVIAL]
    assert code == 2 and "bad-config" in capsys.readouterr().err


def test_manifest_lists_every_file(tmp_path):
    code, out = run_cli(tmp_path, "kernel", "--n", "2,3", "--beta", "1,2", "--delta", "1", "--d", "2")
    assert code == 0
    man = json.loads((out / "manifest.json").read_text())
    emitted = sorted(p.name for p in out.iterdir() if p.name != "manifest.json")
    assert sorted(man["files"]) == emitted
    assert man["passed"] and man["config"]["d"] == 2 and man["_meta"]["seed"] == 0
    for name in emitted:
        meta = bio.read_csv(out / name)[0]
        assert meta["config_hash"] == man["_meta"]["config_hash"] and meta["seed"] == "0"


def test_rerun_is_byte_identical(tmp_path):
    cfg = {"function": {"kind": "random", "degree": 6}, "p": [1, 2], "n": [2, 4, 8, 16]}
    _, a = run_cli(tmp_path / "a", "kfun", "--seed", "5", config=cfg)
    _, b = run_cli(tmp_path / "b", "kfun", "--seed", "5", config=cfg)
    assert (a / "kfunctional.csv").read_bytes() == (b / "kfunctional.csv").read_bytes()
    _, c = run_cli(tmp_path / "c", "kfun", "--seed", "6", config=cfg)
    assert (a / "kfunctional.csv").read_bytes() != (c / "kfunctional.csv").read_bytes()


# -- norms ----------------------------------------------------------------------------------

def test_norms_gamma_grows(tmp_path):
    code, out = run_cli(tmp_path, "norms", "--d", "2", "--beta", "2", "--delta", "0", "--p", "1",
                        "--n", "4,8,16,32")
    assert code == 0
    rec = json.loads((out / "norms_verdicts.json").read_text())["sweeps"][0]
    assert rec["region"] == "Gamma" and rec["probe"]["verdict"] == "growing"  # [DERIVED]


def test_norms_sigma_bounded(tmp_path):
    code, out = run_cli(tmp_path, "norms", "--d", "2", "--beta", "2", "--delta", "2", "--p", "1",
                        "--n", "4,8,16,32")
    assert code == 0
    rec = json.loads((out / "norms_verdicts.json").read_text())["sweeps"][0]
    assert rec["region"] == "Sigma" and rec["probe"]["verdict"] == "bounded"  # [DERIVED]


def test_norms_single_n(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "norms", "--n", "8")  # [TRIVIAL]
    assert code == 2 and "insufficient-points" in capsys.readouterr().err


def test_norms_jobs_match_serial(tmp_path):
    args = ["--beta", "1,2", "--delta", "1", "--p", "0.5,1", "--n", "2,4,8,16"]
    _, a = run_cli(tmp_path / "a", "norms", *args)
    _, b = run_cli(tmp_path / "b", "norms", *args, "--jobs", "2")
    for f in sorted(a.glob("norms_*.csv")):
        assert f.read_bytes() == (b / f.name).read_bytes()


# -- equivalence ------------------------------------------------------------------------------

def test_equivalence_constant_zero(tmp_path):
    code, out = run_cli(tmp_path, "equivalence", "--p", "1", "--n", "4,8,16",
                        config={"function": {"kind": "constant", "value": 2.0}})
    assert code == 0
    _, cols, rows = bio.read_csv(out / "equivalence_2_1_p1.csv")
    for r in rows:
        rec = dict(zip(cols, r))
        for c in ("means_error", "family_error", "realization", "modulus"):
            assert abs(float(rec[c])) < 1e-12  # [TRIVIAL]


def test_equivalence_sigma_no_drift(tmp_path):
    code, out = run_cli(tmp_path, "equivalence", config={
        "function": {"kind": "weierstrass"}, "p": [1, 2, "inf"], "n": [4, 8, 16, 32, 64]})
    assert code == 0
    summary = json.loads((out / "equivalence_summary.json").read_text())
    assert all(not r["drift_flag"] for r in summary["reports"])  # [DERIVED]
    man = json.loads((out / "manifest.json").read_text())
    assert any(k.startswith("no_drift") for k in man["checks"]) and man["passed"]


# -- regions and ft -----------------------------------------------------------------------------

def test_regions(tmp_path):
    pts = [{"inv_p": "1/2", "delta": "1/10"}, {"inv_p": 1, "delta": 0.25}]
    code, out = run_cli(tmp_path, "regions", "--d", "2", config={
        "extra": {"inv_p_max": 2, "inv_p_step": 0.5, "delta_max": 1, "delta_step": 0.25, "points": pts}})
    assert code == 0
    rows = rows_of(out / "regions_d2.csv")
    assert len(rows) == 5 * 5
    labels = {(r[0], r[1]): r[2] for r in rows}
    assert labels[("1", "0.25")] == "Gamma" and labels[("0", "1")] == "Sigma"  # [DERIVED]
    v = json.loads((out / "verdicts.json").read_text())["points"]
    assert v[0]["region"] == "Omega" and v[1]["region"] == "Gamma"


def test_regions_d1_sigma(tmp_path):
    code, out = run_cli(tmp_path, "regions", "--d", "1", config={
        "extra": {"inv_p_max": 1, "inv_p_step": 0.25, "delta_max": 1, "delta_step": 1}})
    assert code == 0
    assert all(r[2] == "Sigma" for r in rows_of(out / "regions_d1.csv") if r[1] == "1")  # [TRIVIAL]


def test_ft_bad_range(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "ft", config={"extra": {"y_min": 5, "y_max": 1}})  # [TRIVIAL]
    assert code == 2 and "bad-config" in capsys.readouterr().err


def test_ft_run(tmp_path):
    code, out = run_cli(tmp_path, "ft", "--beta", "2", "--delta", "1", "--p", "0.5",
                        config={"extra": {"points": 40}})
    assert code == 0
    rep = json.loads((out / "ft_report.json").read_text())
    assert rep["calibration"]["scale"] == pytest.approx(2 * math.pi)
    assert rep["tails"][0]["fit"]["exponent"] == pytest.approx(-2.0, abs=0.3)


# -- config --------------------------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(name="nope").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(d=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(p=[0]).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(n=[]).validate()
    cfg = ExperimentConfig(p=["inf", 2], n=[8, 4, 4]).validate()
    assert cfg.p == [math.inf, 2.0] and cfg.n == [4, 8]


def test_unknown_config_key(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "kernel", config={"colour": 1})
    assert code == 2 and "unknown config keys" in capsys.readouterr().err


def test_run_programmatic(tmp_path):
    cfg = ExperimentConfig(name="modulus", beta=[2.0], p=[1.0, math.inf], n=[2, 4],
                           function={"kind": "cos"}, out=str(tmp_path / "m")).validate()
    man = run(cfg)
    assert man.passed and man.files == ["modulus.csv"]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "brmeans.cli", "regions", "--out", str(tmp_path / "r"),
                           "--d", "3"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "regions:" in proc.stdout
