import csv
import io
import json
import math

import pytest

from jacobi_spectra import cli
from jacobi_spectra.cli import dumps, format_float, main

REF = {"borg": {"s": 1, "d": 3, "nu": 0, "eps": -1}}


def run(tmp_path, capsys, command, config, *extra):
    path = tmp_path / "job.json"
    path.write_text(json.dumps(config))
    code = main([command, "--config", str(path), *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reconstruct(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "reconstruct", REF)
    assert code == 0
    assert json.loads(out) == {"a1": 2.0, "a2": 1.0, "b1": 0.0, "b2": 0.0}


def test_check_empty(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "check-empty", dict(REF, total1=1e-5))
    data = json.loads(out)
    assert code == 0 and data["empty_guaranteed"] is True
    assert data["lhs"] == pytest.approx(0.0778, abs=5e-5)
    assert data["t"] == pytest.approx(0.5671432904, abs=1e-10)


def test_region_scan_single_point(tmp_path, capsys):
    grid = {"re_min": 5, "re_max": 5, "im_min": 0, "im_max": 0, "nx": 1, "ny": 1}
    code, out, _ = run(tmp_path, capsys, "region-scan", dict(REF, total0=1e-4, grid=grid))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and out.splitlines()[0] == cli.CSV_HEADER
    assert len(rows) == 1
    row = rows[0]
    assert float(row["re"]) == 5 and float(row["im"]) == 0
    assert float(row["lhs"]) == pytest.approx(0.0594, abs=5e-5)
    assert row["in_G"] == "1" and row["excluded"] == "0"


def test_region_scan_excluded_point(tmp_path, capsys):
    grid = {"re_min": 3, "re_max": 3, "im_min": 0, "im_max": 0, "nx": 1, "ny": 1}
    _, out, _ = run(tmp_path, capsys, "region-scan", dict(REF, total0=1e-4, grid=grid))
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["lhs"] == "" and row["in_G"] == "0" and row["excluded"] == "1"


def test_bands_shift(tmp_path, capsys):
    cfg = {"bands": {"intervals": [[0, 2], [4, 6]], "nu": 3.5, "eps": 1}, "lambda": [3.0, 2.0]}
    code, out, _ = run(tmp_path, capsys, "eval", cfg)
    data = json.loads(out)
    assert code == 0
    assert data["points"][0]["lam"] == [3.0, 2.0]
    assert data["background"]["b1"] == 0.5


def test_eval_pole_marker(tmp_path, capsys):
    cfg = {"borg": {"s": 1, "d": 3, "nu": 0.5, "eps": 1}, "lambda": 0.5}
    _, out, _ = run(tmp_path, capsys, "eval", cfg)
    pt = json.loads(out)["points"][0]
    assert pt["m"] is None and "m" in pt["poles"] and pt["reg_m"] is not None


def test_jost_and_oracle(tmp_path, capsys):
    cfg = dict(REF, perturbation={"support": 1, "a": [2.0], "b": [[0.0, 5.0]], "c": [2.0]}, lambdas=[[0.1, 0.2], 7.0],
               oracle={"truncation": 60, "contours": [{"circle": {"center": [0, 4.06], "radius": 0.3}}]})
    code, out, _ = run(tmp_path, capsys, "jost", cfg)
    assert code == 0 and len(json.loads(out)["points"]) == 2
    code, out, _ = run(tmp_path, capsys, "jost", dict(cfg, jost={"solver": "series"}))
    assert code == 0
    code, out, _ = run(tmp_path, capsys, "oracle-eigs", cfg)
    data = json.loads(out)
    assert code == 0 and data["windings"][0]["zeros_inside"] == 1
    assert any(abs(complex(*z) - 4.0613j) < 1e-3 for z in data["filtered"])


def test_random_perturbation_deterministic(tmp_path, capsys):
    cfg = {**REF, "random_perturbation": {"support": 4, "scale": 0.3}, "lambda": [0.2, 0.5]}
    _, a, _ = run(tmp_path, capsys, "jost", cfg, "--seed", "5")
    _, b, _ = run(tmp_path, capsys, "jost", cfg, "--seed", "5")
    _, c, _ = run(tmp_path, capsys, "jost", cfg, "--seed", "6")
    assert a == b and a != c


@pytest.mark.parametrize(
    "cfg,msg",
    [
        ({"borg": {"s": 3, "d": 1, "nu": 0, "eps": 1}}, "s < d"),
        ({"borg": {"s": 1, "d": 3, "nu": 0}}, "eps"),
        ({"borg": {"s": 1, "d": 3, "nu": 0, "eps": 2}}, "eps"),
        ({"borg": {"s": "1", "d": 3, "nu": 0, "eps": 1}}, "borg.s"),
        ({}, "borg"),
        (dict(REF, perturbation={"a": [1], "b": [0, 1], "c": [1]}), "share"),
    ],
)
def test_config_errors(tmp_path, capsys, cfg, msg):
    code, _, err = run(tmp_path, capsys, "reconstruct", cfg)
    assert code == 2 and msg in err


def test_missing_file_and_bad_json(tmp_path, capsys):
    assert main(["reconstruct", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["reconstruct", "--config", str(bad)]) == 2


def test_numeric_failure_code(tmp_path, capsys):
    cfg = {**REF, "perturbation": {"a": [2.0] * 6, "b": [[0, 3]] * 6, "c": [2.0] * 6}, "lambda": [0.1, 0.2], "jost": {"solver": "series", "j_max": 1}}
    code, _, err = run(tmp_path, capsys, "jost", cfg)
    assert code == 3 and "numerical" in err


def test_verify_invariant_violation(tmp_path, capsys, monkeypatch):
    from jacobi_spectra import suite

    report = suite.SuiteReport(seed=0, n_cases=1, results=[suite.CheckResult("x.fake", "fail", 2.0, 1, counterexample={"lam": 1})])
    monkeypatch.setattr(cli, "run_invariant_suite", lambda **kw: report)
    assert main(["verify"]) == 4
    assert "x.fake" in capsys.readouterr().err


def test_verify_small(tmp_path, capsys):
    cfg = {"borg": {"s": 1, "d": 3, "nu": 0, "eps": -1}, "verify": {"n_cases": 2, "only": ["regions"]}}
    code, out, _ = run(tmp_path, capsys, "verify", cfg, "--seed", "3")
    assert code == 0 and json.loads(out)["passed"] is True


def test_out_dir_env(tmp_path, capsys, monkeypatch):
    job = tmp_path / "job.json"
    job.write_text(json.dumps(REF))
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path / "outdir"))
    assert main(["reconstruct", "--config", str(job), "--out", "r.json"]) == 0
    assert json.loads((tmp_path / "outdir" / "r.json").read_text())["a1"] == 2.0
    absolute = tmp_path / "abs.json"
    assert main(["reconstruct", "--config", str(job), "--out", str(absolute)]) == 0
    assert absolute.exists()


@pytest.mark.parametrize("x", [0.1, 1 / 3, 2.0, -0.0, 1e-300, 5e-324, 1.7976931348623157e308, 123456789.123456789, math.pi])
def test_float_roundtrip(x):
    s = format_float(x)
    assert float(s) == x and math.copysign(1, float(s)) == math.copysign(1, x)
    assert json.loads(dumps({"v": x, "z": complex(x, -x)})) == {"v": x, "z": [x, -x]}


def test_nonfinite_serialise_as_null():
    assert json.loads(dumps([float("nan"), float("inf")])) == [None, None]


def test_config_roundtrip():
    cfg = cli.JobConfig.from_dict(dict(REF, perturbation={"support": 1, "a": [[1.5, 0.25]], "b": [0.1], "c": [2.0]}))
    again = cli.JobConfig.from_dict(json.loads(dumps(cfg.to_dict())))
    assert again.borg == cfg.borg
    for key in "abc":
        assert list(getattr(again.perturbation, key)) == list(getattr(cfg.perturbation, key))


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "jacobi_spectra", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
