import csv
import json
import math
import subprocess
import sys

import pytest

from frankmin import cli
from frankmin.io import read_grid, read_profile_csv
from frankmin.profile1d import ConvergenceError


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def test_solve1d_nematic(tmp_path, capsys):
    assert run(tmp_path, "solve1d", "--t", "0") == 0
    z, th, ph = read_profile_csv(tmp_path / "profile_t0.csv")
    assert len(z) == 1001
    assert max(abs(th - math.pi * z / 2)) < 1e-9
    meta = json.loads((tmp_path / "profile_t0.json").read_text())
    assert meta["command"] == "solve1d"
    assert meta["parameters"]["nodes"] == 1001
    assert meta["D"] == pytest.approx(math.pi**2 / 4, rel=1e-10)
    assert meta["reflected"] is False
    assert "C=" in capsys.readouterr().out


def test_solve1d_fig1(tmp_path):
    assert run(tmp_path, "solve1d", "--fig1", "--nodes", "401") == 0
    names = sorted(p.name for p in tmp_path.glob("fig1_t*.csv"))
    assert names == ["fig1_t10.csv", "fig1_t2.5.csv", "fig1_t20.csv", "fig1_t5.csv"]


def test_solve1d_general_constants(tmp_path):
    assert run(tmp_path, "solve1d", "--t", "1", "--k", "1,2,3,0", "--nodes", "401") == 0
    meta = json.loads((tmp_path / "profile_t1.json").read_text())
    assert (meta["k1"], meta["k2"], meta["k3"]) == (1.0, 2.0, 3.0)
    assert "delta_t" not in meta


def test_solve1d_reflected(tmp_path):
    assert run(tmp_path, "solve1d", "--t", "-2.5", "--nodes", "401") == 0
    meta = json.loads((tmp_path / "profile_t2.5.json").read_text())
    assert meta["reflected"] is True and meta["t"] == 2.5


def test_embed(tmp_path):
    assert run(tmp_path, "embed", "--t", "0.5", "--dims", "4,4,9") == 0
    g = read_grid(tmp_path / "embed_t0.5.ofgrid")
    assert g.dims == (4, 4, 9)
    meta = json.loads((tmp_path / "embed_t0.5.json").read_text())
    assert meta["energy"] == pytest.approx(meta["profile_energy"], rel=1e-2)


def test_scan_default(tmp_path, capsys):
    assert run(tmp_path, "scan") == 0
    rows = list(csv.reader((tmp_path / "scan.csv").open()))
    assert len(rows) == 152
    out = capsys.readouterr().out
    assert "0.7667" in out and "1.0620" in out
    meta = json.loads((tmp_path / "scan.json").read_text())
    assert meta["threshold_frustrated"] == pytest.approx(0.76667, abs=1e-5)


def test_scan_single_row(tmp_path, capsys):
    assert run(tmp_path, "scan", "--t-min", "0", "--t-max", "0") == 0
    assert len((tmp_path / "scan.csv").read_text().splitlines()) == 2
    assert "gamma_frustrated=3.9128" in capsys.readouterr().out


def test_scan_bad_range(tmp_path):
    assert run(tmp_path, "scan", "--t-min", "1", "--t-max", "0.5") == 1


@pytest.mark.parametrize("bc", ["frustrated", "homeotropic"])
def test_relax_small(tmp_path, bc):
    argv = ["relax", "--bc", bc, "--t", "0.5", "--dims", "4,4,9", "--max-iter", "200", "--nodes", "401"]
    assert run(tmp_path, *argv) == 0
    stem = f"relax_{bc}_t0.5_seed0"
    meta = json.loads((tmp_path / f"{stem}.json").read_text())
    rep = meta["report"]
    assert rep["stop_reason"] in ("grad_tol", "max_iter", "stalled")
    assert all(b <= a for a, b in zip(rep["energy_trace"], rep["energy_trace"][1:]))
    assert read_grid(tmp_path / f"{stem}.ofgrid").dims == (4, 4, 9)


def test_verify_suite(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suite", "angle-inequality") == 0
    rep = json.loads((tmp_path / "verify_angle-inequality.json").read_text())
    assert rep["passed"] and rep["metadata"]["command"] == "verify"
    assert "pass" in capsys.readouterr().out


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    fake = {"suite": "x", "passed": False, "cases": [{"pass": False}]}
    monkeypatch.setattr(cli, "run_suite", lambda name: dict(fake))
    assert run(tmp_path, "verify", "--suite", "splitting") == 3


def test_solver_failure_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise ConvergenceError("no bracket")
    monkeypatch.setattr(cli, "minimize_1d", boom)
    assert run(tmp_path, "solve1d", "--t", "1") == 2


@pytest.mark.parametrize("argv", [
    ["solve1d", "--t", "abc"],
    ["solve1d", "--k", "1,2"],
    ["solve1d", "--k", "1,2,3", "--one-constant"],
    ["relax", "--dims", "4,4"],
    ["relax", "--perturb", "-1"],
    ["embed", "--l1", "-1", "--dims", "4,4,5"],
    ["verify", "--suite", "nope"],
    ["frobnicate"],
])
def test_usage_errors(tmp_path, argv):
    with pytest.raises(SystemExit) as exc:
        code = run(tmp_path, *argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1


def test_thread_cap_validation(tmp_path, monkeypatch):
    monkeypatch.setenv("FRANKMIN_THREADS", "many")
    assert run(tmp_path, "scan") == 1
    monkeypatch.setenv("FRANKMIN_THREADS", "0")
    assert run(tmp_path, "scan") == 1
    monkeypatch.setenv("FRANKMIN_THREADS", "1")
    assert run(tmp_path, "scan") == 0


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "frankmin", "scan", "--t-max", "0", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "threshold" in r.stdout
