import json
import subprocess
import sys

import pytest

from biaslab.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_race_rows(tmp_path, capsys):
    assert run(tmp_path, "race", "--q", "3", "--a1", "1", "--a2", "2", "--k", "2", "--qmax", "1000000") == 0
    csv = (tmp_path / "race_q3_a1_a2_k2_Q1000000.csv").read_text().splitlines()
    assert len(csv) == 1002
    man = json.loads((tmp_path / "race_q3_a1_a2_k2_Q1000000.manifest.json").read_text())
    assert man["command"] == "race" and len(man["artifacts"]) == 2


def test_missing_argument_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["race", "--a1", "1", "--a2", "2", "--qmax", "10"])
    assert e.value.code == 2


def test_invalid_arguments_exit_2(tmp_path):
    assert run(tmp_path, "race", "--q", "5", "--a1", "1", "--a2", "6", "--qmax", "100") == 2
    assert run(tmp_path, "quad", "--d", "-12", "--x", "100") == 2


def test_budget_exit_3(tmp_path, monkeypatch):
    monkeypatch.setenv("BIASLAB_BUDGET_MB", "1")
    assert run(tmp_path, "race", "--q", "3", "--a1", "1", "--a2", "2", "--qmax", "10000000") == 3


def test_verify_euler(tmp_path, capsys):
    assert run(tmp_path, "verify-euler", "--q", "5", "--k", "2", "--depth", "5000") == 0
    out = json.loads((tmp_path / "verify_euler_q5_k2_D5000.json").read_text())
    assert out["max_discrepancy"] <= 1e-9


def test_fflpoly(tmp_path, capsys):
    assert run(tmp_path, "fflpoly", "--p", "3", "--modulus", "0,0,1@3") == 0
    out = json.loads((tmp_path / "fflpoly_p3_m0-0-1_3.json").read_text())
    assert out["Phi"] == 6 and len(out["characters"]) == 6
    assert out["anomalous_roots"] == 0
    assert all(c["classification"] is not None for c in out["characters"])


def test_constants_and_quad(tmp_path, capsys):
    assert run(tmp_path, "constants", "--q", "5", "--k", "2") == 0
    c = json.loads((tmp_path / "constants_q5_k2.json").read_text())
    assert c["c_zero"] < c["c_unit"]
    assert run(tmp_path, "quad", "--d", "-4", "--k", "2", "--x", "100000") == 0
    q = json.loads((tmp_path / "quad_d-4_k2_x100000.json").read_text())
    assert {"predicted", "empirical", "lambda", "R_k_2", "zeta_K_k"} <= set(q)


def test_ff_commands(tmp_path, capsys):
    assert run(tmp_path, "ffrace", "--p", "2", "--modulus", "1,1,1@2", "--g1", "1", "--g2", "0,1", "--N", "12") == 0
    assert run(tmp_path, "ffmain", "--p", "2", "--modulus", "0,1@2", "--nmax", "12") == 0
    rep = json.loads((tmp_path / "ffmain_p2_m0-1_2_k2.json").read_text())
    assert 0.05 <= rep["ratio_to_paper_constant"][-1][1] <= 20


def test_entry_point_module(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "biaslab.cli", "constants", "--q", "3", "--k", "3", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert r.returncode == 0 and "c_unit" in r.stdout
