import json
import subprocess
import sys

import pytest

from gluing.cli import main

Z = {"rank": 1, "torsion": []}
ZERO = {"rank": 0, "torsion": []}


def _run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_obs_d8_all_routes(tmp_path):
    code, rep = _run(tmp_path, "obs", "--group", "D8", "--prime", "2", "--functor", "bdual",
                     "--routes", "direct,bar,oliver")
    assert code == 0
    assert rep["summary"] == {"Ker": Z, "Obs": ZERO}
    assert rep["details"]["agree"] is True


def test_obs_xs3_table(tmp_path):
    code, rep = _run(tmp_path, "obs", "--group", "XS(3,+)", "--prime", "3", "--table", "dt",
                     "--routes", "formula,orbit")
    assert code == 0
    assert rep["summary"]["Obs"] == {"rank": 0, "torsion": [2, 2, 2]}


def test_obs_c9_direct(tmp_path):
    code, rep = _run(tmp_path, "obs", "--group", "C9", "--prime", "3", "--functor", "bdual",
                     "--routes", "direct")
    assert code == 0 and rep["summary"] == {"Ker": Z, "Obs": ZERO}


@pytest.mark.parametrize("argv", [
    ["obs", "--group", "NOPE", "--functor", "bdual"],
    ["obs", "--group", "C4", "--table", "rq"],
    ["obs", "--group", "D8", "--functor", "bdual", "--routes", "formula"],
    ["obs", "--group", "D8", "--functor", "bdual", "--table", "dt"],
    ["obs", "--group", "D8", "--prime", "3", "--functor", "bdual"],
    ["verify", "no-such-theorem"],
])
def test_input_errors_exit_3(tmp_path, argv):
    code, rep = _run(tmp_path, *argv)
    assert code == 3 and rep["ok"] is False


def test_chain_cap_exit_4(tmp_path):
    code, rep = _run(tmp_path, "obs", "--group", "D8", "--functor", "bdual", "--routes", "bar",
                     "--chain-cap", "5")
    assert code == 4 and rep["error"] == "BarSizeBound"


def test_element_cap_exit_4(tmp_path):
    code, rep = _run(tmp_path, "--element-cap", "16", "obs", "--group", "D32",
                     "--functor", "bdual")
    assert code == 4


def test_reports_are_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        main(["obs", "--group", "Q8", "--functor", "constant:F2", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_timings_only_on_request(tmp_path):
    _, rep = _run(tmp_path, "obs", "--group", "C4", "--functor", "bdual")
    assert "timings" not in rep
    _, rep = _run(tmp_path, "obs", "--group", "C4", "--functor", "bdual", "--timings")
    assert rep["timings"]["seconds"] >= 0


def test_verify_subset(tmp_path):
    code, rep = _run(tmp_path, "verify", "bstar", "--max-order", "8", "--prime", "2")
    assert code == 0 and rep["ok"] and rep["checked"] == 8


def test_verify_parallel_matches_serial(tmp_path):
    _, serial = _run(tmp_path, "verify", "h1", "--max-order", "16")
    _, parallel = _run(tmp_path, "verify", "h1", "--max-order", "16", "--jobs", "2")
    assert serial == parallel


def test_groups_describe(tmp_path):
    code, rep = _run(tmp_path, "groups", "describe", "D8")
    assert code == 0
    assert rep["order"] == 8 and rep["subgroups"] == 10 and rep["subgroup_classes"] == 8
    assert len(rep["S"]["entries"]) == 1


def test_groups_list(tmp_path):
    code, rep = _run(tmp_path, "groups", "list")
    assert code == 0 and {"spec": "D8", "order": 8} in rep["groups"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gluing", "obs", "--group", "C4", "--functor",
                           "bdual", "--routes", "direct"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["Ker"] == Z


def test_functor_file(tmp_path):
    from gluing import catalog
    from gluing.functors import BurnsideDual, save_functor
    path = tmp_path / "f.json"
    save_functor(BurnsideDual(catalog("C2xC2")), str(path))
    code, rep = _run(tmp_path, "obs", "--group", "C2xC2", "--functor", str(path),
                     "--routes", "direct,bar")
    assert code == 0 and rep["summary"] == {"Ker": Z, "Obs": ZERO}
