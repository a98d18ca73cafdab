import json
import subprocess
import sys

import pytest

from floerfam import novikov
from floerfam.cli import run


@pytest.fixture(autouse=True)
def keep_novikov_config(monkeypatch):
    monkeypatch.setattr(novikov, "CONFIG", novikov.CONFIG)


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_validate_fixtures(capsys):
    code, rep, _ = call(capsys, "validate", "--fixture", "circle")
    assert code == 0
    code, rep, _ = call(capsys, "validate", "--fixture", "corrupted-sign", "--truncation", "6")
    assert code == 1
    assert rep["relations"]["failure_lengths"] == [3]


def test_fixture_files_round_trip(capsys, tmp_path):
    code, rep, _ = call(capsys, "fixture", "torus", "--dir", str(tmp_path))
    assert code == 0
    cat = tmp_path / "torus.category.json"
    deco = tmp_path / "torus.decoration.json"
    assert cat.exists() and deco.exists()
    code, rep, _ = call(capsys, "validate", "--category", str(cat), "--decoration", str(deco))
    assert code == 0


def test_input_errors(capsys, tmp_path):
    code, _, err = call(capsys, "validate", "--category", str(tmp_path / "missing.json"))
    assert code == 2 and "error" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"objects": [\n  1,,\n]}')
    code, _, err = call(capsys, "validate", "--category", str(bad))
    assert code == 2 and "bad.json: line 2 col 5" in err
    code, _, _ = call(capsys, "validate", "--fixture", "circle", "--grading", "z2")
    assert code == 2


def test_zeros(capsys):
    code, rep, _ = call(capsys, "zeros", "--poly", "z - T")
    assert code == 0 and rep["zeros"] == ["1"]
    code, rep, _ = call(capsys, "zeros", "--poly", "z^2 - z")
    assert code == 0 and rep["zeros"] == ["0"]


def test_sheaf_commands(capsys, tmp_path):
    cx = tmp_path / "c.json"
    cx.write_text(json.dumps({"ring_rank": 1, "basis": [{"id": "a", "degree": 0}, {"id": "b", "degree": 1}],
                              "d": [{"from": "a", "to": "b", "entry": "z - 1"}]}))

    code, rep, _ = call(capsys, "sheaf", "real-line", "--complex", str(cx), "--alpha", "1")
    assert code == 0 and rep["exceptional"] == ["0"]
    code, rep, _ = call(capsys, "sheaf", "exactness", "--complex", str(cx), "--cocycle", '{"b": "1"}',
                        "--point", "(1)", "--point", "(-T^-1)")
    assert code == 0 and rep["solve_agrees"]
    assert sorted(rep["membership"].values()) == [False, True]
    assert [v for k, v in rep["membership"].items() if "T^(-1)" in k] == [True]
    code, rep, _ = call(capsys, "sheaf", "stratify", "--fixture", "torus", "--source", "L1")
    assert code == 0
    code, rep, _ = call(capsys, "sheaf", "stabilizer", "--fixture", "torus", "--source", "L1", "--kernel", "0,1")
    assert code == 0
    code, rep, _ = call(capsys, "sheaf", "stabilizer", "--fixture", "torus", "--source", "L1", "--kernel", "1,0")
    assert code == 1


def test_family_commands(capsys):
    code, rep, _ = call(capsys, "family", "grouplike", "--fixture", "circle", "--samples", "3")
    assert code == 0
    code, rep, _ = call(capsys, "family", "action-check", "--fixture", "circle", "--point", "(2)")
    assert code == 0


def test_affinoid_commands(capsys):
    code, rep, _ = call(capsys, "affinoid", "norm", "--poly", "z", "--box=-1:1")
    assert code == 0 and rep["exponent"] == "-1"
    code, rep, _ = call(capsys, "affinoid", "shrink", "--poly", "z - 1", "--box=-1:1")
    assert code == 1 and rep["kind"] == "TiedLeadingTerms"


def test_config_defaults_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": 2, "seed": 3}))
    code, a, _ = call(capsys, "family", "grouplike", "--fixture", "circle", "--config", str(cfg))
    assert code == 0 and len(a["pairs"]) == 2
    code, b, _ = call(capsys, "family", "grouplike", "--fixture", "circle", "--config", str(cfg), "--samples", "3")
    assert len(b["pairs"]) == 3


def test_cutoff_flag_changes_precision(capsys):
    code, _, _ = call(capsys, "validate", "--fixture", "circle", "--cutoff", "5")
    assert code == 0
    assert novikov.CONFIG.default_relative_precision == 5


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert run(["sheaf", "stratify", "--fixture", "torus", "--source", "L1", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "floerfam", "validate", "--fixture", "circle"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)
