from __future__ import annotations

import json
import subprocess
import sys

import pytest

from blct_surf.cli import run
from blct_surf.lattice import build_model, params_from_dict

M7 = ["--r", "7", "--beta", "1/100"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_vol_of_fiber_plus_C(capsys):
    code, data = call_json(capsys, "vol", "F1+C", *M7)
    assert code == 0 and data["volume"] == "0/1" and data["schema"] == 1


def test_finite_k(capsys):
    code, data = call_json(capsys, "finite-k", "1", "1", "3")
    assert code == 0 and data["ord_value"] == "1/2"


def test_verify_exit_codes(capsys):
    code, data = call_json(capsys, "verify", *M7)
    assert code == 0 and data["verdict"] == "certified"
    code, data = call_json(capsys, "verify", "--r", "7", "--beta", "199/300")
    assert code == 1 and data["verdict"] == "failed"
    code, _, err = call(capsys, "verify", "--r", "6", "--beta", "1/100")
    assert code == 2 and "r >= 7" in err


def test_verify_table(capsys):
    code, out, _ = call(capsys, "verify", *M7, "--blow-zero")
    assert code == 0
    assert "verdict: certified" in out and "claim 6" in out


@pytest.mark.parametrize("argv", [
    ["vol", "f+X", *M7],
    ["vol", "f+"],
    ["vol", "f", "--r", "7", "--beta", "abc"],
    ["frobnicate"],
    ["model", "--r", "7", "--beta", "1"],
    ["model", "--model", "/nonexistent.json"],
    ["sweep", "--r", "x-y"],
])
def test_input_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_model_round_trip(capsys, tmp_path):
    out = tmp_path / "m.json"
    assert run(["model", *M7, "--format", "json", "--output", str(out)]) == 0
    first = out.read_text()
    data = json.loads(first)
    assert build_model(params_from_dict(data)) == build_model(params_from_dict({"r": 7, "blown": list("1234567"), "beta": "1/100"}))
    code, second, _ = call(capsys, "model", "--model", str(out), "--format", "json")
    assert code == 0 and second == first


def test_zariski_and_intersect(capsys):
    code, data = call_json(capsys, "zariski", "antiK - e1", *M7)
    assert data["negative_part"] == {"C": "1/100", "F1": "1/1"} and data["volume"] == "0/1"
    code, data = call_json(capsys, "zariski", "e1 - f", *M7)
    assert code == 0 and data["pseudoeffective"] is False
    code, out, _ = call(capsys, "zariski", *M7, "--format", "json", "--", "-1*f")
    assert code == 0 and json.loads(out)["pseudoeffective"] is False
    code, data = call_json(capsys, "intersect", "C", "C", *M7)
    assert data["value"] == "-3/1"


def test_profile_and_ord_bound(capsys):
    code, data = call_json(capsys, "profile", "antiK", "e1", *M7)
    assert [s["x_hi"] for s in data["segments"]] == ["1/100", "99/100", "1/1"]
    code, data = call_json(capsys, "ord-bound", "f+g", "f", "--r", "0", "--beta", "1/10")
    assert data["bound"] == "1/2"


def test_lc_commands(capsys, tmp_path):
    code, data = call_json(capsys, "lc-criteria", "--a", "1/2", "--b", "0", "--m", "1", "--BO", "0", "--CO", "8/5")
    assert data["criteria"]["mult_refined"]["verdict"] == "inapplicable"
    germ = tmp_path / "g.json"
    germ.write_text(json.dumps({"roots": ["p"], "edges": [["p", "x"], ["p", "y"], ["p", "z"]],
                                "branches": [{"path": ["p", n], "coefficient": "2/3"} for n in "xyz"]}))
    code, data = call_json(capsys, "lc-oracle", str(germ))
    assert code == 0 and data["verdict"] == "lc"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert call(capsys, "lc-oracle", str(bad))[0] == 2


def test_fuzz_is_deterministic(capsys):
    a = call(capsys, "fuzz", "--trials", "50", "--seed", "3", "--format", "json")
    b = call(capsys, "fuzz", "--trials", "50", "--seed", "3", "--format", "json")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["violations"] == 0


def test_sweep(capsys):
    code, data = call_json(capsys, "sweep", "--r", "7", "--betas", "1/100")
    assert code == 0 and data["all_certified"] and len(data["entries"]) == 2
    code, data = call_json(capsys, "sweep", "--r", "6-7", "--no-blow-zero")
    assert code == 1 and data["entries"][0]["verdict"] == "error"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "blct_surf", "finite-k", "1", "1", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "ord_value: 1/2" in proc.stdout
