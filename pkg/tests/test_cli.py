import csv
import json

import pytest

import resonant_waves as rw
from resonant_waves.cli import cli_run

CONFIG_B = """
case = b
d = 2
omega1 = 1.6180339887498949
eps = 1e-4
gamma = 1e-3
M1 = 4
M2 = 24
N = 6
sigma = 0.05
s = 0.4
a3 = 0:1:0, 1:1:0
lmax = 64
"""

PROBE_CONFIG = CONFIG_B + """
probe_D = 2
probe_a = 0:1:0, 1:1:0
rho_grid = 1e-3, 1e-2, 1e-1
probe_eps = 1e-4, 5e-5
"""


def test_sieve_writes_csv(tmp_path, capsys):
    out = tmp_path / "sieve.csv"
    code = cli_run(["sieve", "--case", "b", "--gamma", "1e-3",
                    "--interval", "-1e-3,1e-3", "--count", "50",
                    "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert rows and set(rows[0]) == {"case", "eps", "omega1", "gamma", "Lmax",
                                     "accepted", "witness_l1", "witness_l2"}
    assert any(r["accepted"] == "1" for r in rows)


def test_sieve_case_a(tmp_path, capsys):
    out = tmp_path / "sieve_a.csv"
    code = cli_run(["sieve", "--case", "a", "--gamma", "0.1",
                    "--interval", "0.4,0.6", "--count", "40",
                    "--lmax", "8", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    rejected = [r for r in rows if r["accepted"] == "0"]
    assert rejected and all(r["witness_l2"] for r in rejected)


def test_missing_config_is_usage_error(capsys):
    assert cli_run(["solve", "--config", "does/not/exist.cfg"]) == 1


def test_bad_subcommand_is_usage_error(capsys):
    assert cli_run(["frobnicate"]) == 1


def test_solve_and_verify(tmp_path, capsys):
    cfg = tmp_path / "b.cfg"
    cfg.write_text(CONFIG_B)
    out = tmp_path / "report.json"
    assert cli_run(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["schema"] == "resonant-waves/1"
    assert cli_run(["verify", "--config", str(cfg), "--report", str(out)]) == 0


def test_sieve_rejection_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(CONFIG_B.replace("omega1 = 1.6180339887498949",
                                    "omega1 = 1.5"))
    assert cli_run(["solve", "--config", str(cfg)]) == 2


def test_solver_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "zero.cfg"
    cfg.write_text(CONFIG_B.replace("a3 = 0:1:0, 1:1:0", "a3 = 0:0:0")
                   .replace("case = b", "case = a")
                   .replace("M1 = 4", "M1 = 14"))
    assert cli_run(["solve", "--config", str(cfg)]) == 3


def test_scan(tmp_path, capsys):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text(CONFIG_B + "\neps_grid = 1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6, 3.125e-6\n")
    out = tmp_path / "scan.json"
    assert cli_run(["scan", "--config", str(cfg), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert abs(payload["amplitude_slope"] - 0.5) < 0.05


def test_probe(tmp_path, capsys):
    cfg = tmp_path / "probe.cfg"
    cfg.write_text(PROBE_CONFIG)
    out = tmp_path / "probe.json"
    assert cli_run(["probe", "--config", str(cfg), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["root_free"] is True


def test_orbit_csv_export(tmp_path):
    orbit = rw.limit_orbit(2, 1.0, 1e-4)
    path = tmp_path / "orbit.csv"
    rw.write_orbit_csv(orbit, str(path))
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 1024
    assert abs(float(rows[0]["qbar"]) - rw.evaluate(orbit.qbar, 0.0, 0.0)) < 1e-12
