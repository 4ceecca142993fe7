import json
import subprocess
import sys

import pytest

from cfusion.cli import main, selftest_checks
from cfusion.numerics import DEFAULT_TOL
from cfusion.scenario import read_scenario

from conftest import DATA

EXIT_MATRIX = [
    ("bounds", "disk", [], 0),
    ("bounds", "skew_pair", [], 0),
    ("bounds", "bessel_only", [], 2),
    ("bounds", "malformed", [], 1),
    ("bounds", "zero_weight", [], 1),
    ("verify-dual", "disk", [], 0),
    ("verify-dual", "disk_q2", [], 4),
    ("verify-dual", "disk_missing_q", [], 1),
    ("verify-dual", "disk_bad_shape", [], 3),
    ("solve-q", "disk", [], 0),
    ("solve-q", "line_two_atoms", [], 0),
    ("solve-q", "bessel_only", [], 4),
    ("canonical-dual", "disk", [], 0),
    ("canonical-dual", "skew_pair", [], 0),
    ("canonical-dual", "bessel_only", [], 2),
    ("perturb", "disk_perturbed", ["--lam", "0", "--eps", "0.1"], 0),
    ("perturb", "disk_perturbed", ["--lam", "0", "--eps", "0.01"], 4),
    ("perturb", "disk_perturbed", ["--lam", "0.5", "--eps", "0.5"], 4),
    ("glue", "disk_glue", [], 0),
    ("glue", "disk", [], 1),
]


@pytest.mark.parametrize("command,fixture,extra,code", EXIT_MATRIX)
def test_exit_codes(command, fixture, extra, code, tmp_path, capsys):
    out = tmp_path / "r.json"
    path = str(DATA / f"{fixture}.cfuse.json")
    assert main([command, path, "--json", str(out), *extra]) == code
    if code in (0, 4):
        report = json.loads(out.read_text())
        assert report["exit_code"] == code
        assert report["command"] == command
        assert report["schema"] == "cfuse-report/1"


def read_report(tmp_path, *argv):
    out = tmp_path / "r.json"
    main([*argv, "--json", str(out)])
    return json.loads(out.read_text())


def test_bounds_report(tmp_path):
    r = read_report(tmp_path, "bounds", str(DATA / "disk.cfuse.json"))
    assert r["results"]["bounds"]["lower"] == pytest.approx(1.0, abs=1e-12)
    assert r["results"]["bounds"]["upper"] == pytest.approx(1.0, abs=1e-12)


def test_solve_q_report(tmp_path):
    r = read_report(tmp_path, "solve-q", str(DATA / "line_two_atoms.cfuse.json"))
    assert r["results"]["nullspace_dim"] == 3
    assert r["results"]["unique"] is False


def test_perturb_report(tmp_path):
    r = read_report(tmp_path, "perturb", str(DATA / "disk_perturbed.cfuse.json"),
                    "--eps", "0.1")
    assert r["results"]["guaranteed_lower"] == pytest.approx(0.81)
    assert r["results"]["actual_lower"] == pytest.approx(0.81)
    assert r["verdicts"]["lower_bound_sound"]["pass"] is True


def test_emit_round_trips(tmp_path):
    emitted = tmp_path / "dual.cfuse.json"
    assert main(["canonical-dual", str(DATA / "skew_pair.cfuse.json"),
                 "--emit", str(emitted)]) == 0
    assert main(["verify-dual", str(emitted)]) == 0
    emitted = tmp_path / "solved.cfuse.json"
    assert main(["solve-q", str(DATA / "line_two_atoms.cfuse.json"), "--emit", str(emitted)]) == 0
    _, _, Q = read_scenario(emitted).frames()
    assert Q is not None


def test_selftest_rows():
    rows = selftest_checks(DEFAULT_TOL, 0)
    assert rows and all(ok for _, ok, _ in rows)
    assert main(["selftest"]) == 0


def test_tolerance_flags(tmp_path):
    r = read_report(tmp_path, "bounds", str(DATA / "disk.cfuse.json"),
                    "--tol", "1e-6", "--rank-tol", "1e-9", "--psd-tol", "1e-7")
    assert r["tolerances"] == {"rank_tol": 1e-9, "residual_tol": 1e-6, "psd_tol": 1e-7}


def test_json_reports_are_deterministic(tmp_path):
    for argv in (["selftest"], ["verify-dual", str(DATA / "disk.cfuse.json")],
                 ["perturb", str(DATA / "disk_perturbed.cfuse.json"), "--eps", "0.1"]):
        texts = []
        for k in range(2):
            out = tmp_path / f"r{k}.json"
            main([*argv, "--json", str(out), "--seed", "7"])
            texts.append(out.read_bytes())
        assert texts[0] == texts[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cfusion", "selftest"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "exit 0" in res.stdout
