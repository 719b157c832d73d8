import json
import os
import shutil
import subprocess
import sys

import pytest

from borelcm import __version__
from borelcm.algebra import MONOMIAL_ORDER
from borelcm.cli import main

DIAGRAMS = os.path.join(os.path.dirname(__file__), os.pardir, "diagrams")


def path(name):
    return os.path.join(DIAGRAMS, name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cm_suspension_table(capsys):
    code, out, _ = run(capsys, "cm", path("susp_w711.json"), "--format", "table")
    assert code == 0
    assert "NotCohenMacaulay: sum-of-images fails at degree 2, missing class t" in out.splitlines()


def test_cm_sp1cubed_table(capsys):
    code, out, _ = run(capsys, "cm", path("sp1cubed.json"), "--format", "table")
    assert code == 0
    assert "CohenMacaulay (corank ≤ 1, sum surjective through 12)" in out.splitlines()


def test_json_report_metadata_and_determinism(capsys):
    _, a, _ = run(capsys, "cm", path("susp_w711.json"), "--format", "json")
    _, b, _ = run(capsys, "cm", path("susp_w711.json"), "--format", "json")
    assert a == b
    rep = json.loads(a)
    assert rep["version"] == __version__ and rep["monomial_order"] == MONOMIAL_ORDER
    assert rep["max_degree"] == 20 and rep["seed"] == 20240601
    assert rep["verdict"]["certificate"]["zero_divisor"]["missing_class"] == "t"


def test_unknown_exit_code(capsys):
    code, out, _ = run(capsys, "cm", path("corank_t2.json"), "--max-degree", "3", "--format", "json")
    assert code == 2
    assert json.loads(out)["verdict"]["decision"] == "UnknownUpTo"


@pytest.mark.parametrize("name,D,expected", [
    ("susp_w711.json", 4, [1, 0, 0, 1, 1]),
    ("rp2_join_w7.json", 8, [1, 0, 0, 0, 2, 0, 1, 0, 3]),
])
def test_betti(capsys, name, D, expected):
    code, out, _ = run(capsys, "betti", path(name), "--max-degree", str(D), "--format", "json")
    assert code == 0 and json.loads(out)["betti"] == expected


def test_betti_homogeneous(capsys):
    code, out, _ = run(capsys, "betti", "--homogeneous", path("su3_s1.json"), "--max-degree", "7",
                       "--format", "json")
    assert code == 0 and json.loads(out)["betti"] == [1, 0, 1, 0, 0, 1, 0, 1]


def test_max_degree_precedence(capsys):
    _, out, _ = run(capsys, "betti", path("susp_w711.json"), "--format", "json")
    assert json.loads(out)["max_degree"] == 20
    _, out, _ = run(capsys, "betti", path("susp_w711.json"), "--max-degree", "6", "--format", "json")
    assert json.loads(out)["max_degree"] == 6


def test_model_report(capsys):
    code, out, _ = run(capsys, "model", path("corank_t2.json"), "--max-degree", "6", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["ring"]["betti"] == [1, 0, 3, 0, 4, 0, 5]


def test_join_classify(capsys):
    code, out, _ = run(capsys, "join", "W7", "W7", "--classify", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"]["decision"] == "NotCohenMacaulay"
    code, out, _ = run(capsys, "join", "S5", "W7", "--classify", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"]["decision"] == "CohenMacaulay"


def test_join_bad_name(capsys):
    code, _, err = run(capsys, "join", "BadName", "W7")
    assert code == 1 and "fiber not in catalog" in err


def test_join_refusal_is_verbatim(capsys):
    code, _, err = run(capsys, "join", "S5", "W7", "--require-noncm")
    assert code == 1 and "its induced map is surjective" in err


def test_join_from_pair_files(capsys):
    code, out, _ = run(capsys, "join", path("su3_s1.json"), path("su3_su2.json"), "--classify",
                       "--format", "json")
    assert code == 0 and json.loads(out)["verdict"]["decision"] == "CohenMacaulay"


@pytest.mark.parametrize("cmd", [["join", "W7", "B13", "--require-noncm"], ["suspension", "W7"],
                                 ["join", "CP2", "S5"]])
def test_written_diagrams_round_trip(capsys, tmp_path, cmd):
    out_file = tmp_path / "d.json"
    code, _, _ = run(capsys, *cmd, "-o", str(out_file), "--classify", "--format", "json")
    _, first, _ = run(capsys, *cmd, "--classify", "--format", "json")
    code2, again, _ = run(capsys, "cm", str(out_file), "--format", "json")
    assert code == code2
    assert json.loads(first)["verdict"] == json.loads(again)["verdict"]


def test_empty_file(capsys, tmp_path):
    f = tmp_path / "empty.json"
    f.write_text("")
    code, _, err = run(capsys, "cm", str(f))
    assert code == 1 and ":1:1:" in err


def test_malformed_json_reports_position(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"G": "SU(3)",\n "H": }')
    code, _, err = run(capsys, "cm", str(f))
    assert code == 1 and ":2:7:" in err


def test_unknown_generator_reports_field(capsys, tmp_path):
    raw = json.load(open(path("susp_w711.json")))
    raw["iota_plus"]["x6"] = "2*q^3"
    f = tmp_path / "u.json"
    f.write_text(json.dumps(raw))
    code, _, err = run(capsys, "cm", str(f))
    assert code == 1 and "iota_plus.x6" in err and "'q'" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "cm", "/nonexistent/d.json")
    assert code == 1 and "d.json" in err


def test_max_degree_below_two(capsys):
    code, _, err = run(capsys, "betti", path("susp_w711.json"), "--max-degree", "1")
    assert code == 1


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["fibers"]["B13"]["type"] == "B13Type"
    code, out, _ = run(capsys, "catalog", "--diagram", "sp1cubed")
    assert json.loads(out)["options"]["max_degree"] == 12


def test_format_defaults_to_json_when_piped():
    exe = shutil.which("borelcm")
    cmd = [exe] if exe else [sys.executable, "-m", "borelcm.cli"]
    res = subprocess.run(cmd + ["cm", path("sp1cubed.json")], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["verdict"]["decision"] == "CohenMacaulay"
