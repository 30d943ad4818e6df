from __future__ import annotations

import json
import subprocess
import sys

from resultlab.cli import _free_options, main


def test_list(capsys):
    assert main(["--list"]) == 0
    assert "trees.verify" in capsys.readouterr().out.split()


def test_unknown_experiment_exit_code(capsys):
    assert main(["nope"]) == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_bad_parameter_exit_code(capsys):
    assert main(["codes.verify", "--n", "many"]) == 2
    assert "bad parameter: n" in capsys.readouterr().err


def test_free_options():
    assert _free_options(["--n-max", "8", "--emit-all", "--etas=0.5,1"]) == {"n-max": "8", "emit-all": "true", "etas": "0.5,1"}


def test_run_to_file_and_flags(tmp_path, capsys):
    out = tmp_path / "codes.json"
    code = main(["codes.verify", "--n", "9", "--param", "n_min=3", "--format", "json", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["pass_flags"] == {"all_verified": True, "r_is_floor_half": True}
    assert [r["n"] for r in doc["rows"]] == list(range(3, 10))
    assert "PASS all_verified" in capsys.readouterr().err


def test_failing_flag_exit_code(capsys):
    # C = 3 with tiny trees cannot exceed 504, so the flag fails
    assert main(["trees.family", "--trees", "5", "--n-min", "6", "--n-max", "8"]) == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "resultlab", "--list"], capture_output=True, text=True, check=True)
    assert "sphereq.compare" in res.stdout
