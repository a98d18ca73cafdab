"""Acceptance criteria 1-10, one PASS/FAIL line each (shown in the terminal summary)."""
import pytest

from conftest import ACCEPTANCE_LINES
from floerfam.acceptance import AcceptanceConfig, run_all


@pytest.fixture(scope="module")
def results():
    out = {r.number: r for r in run_all(AcceptanceConfig())}
    ACCEPTANCE_LINES[:] = [r.line() for _, r in sorted(out.items())]
    for line in ACCEPTANCE_LINES:
        print(line)
    return out


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(results, number):
    r = results[number]
    print(r.line())
    assert r.passed, r.dumps()


def test_timed_criteria_report_their_budget(results):
    cfg = AcceptanceConfig()
    assert results[1].seconds < cfg.identity_seconds
    assert results[7].seconds < cfg.zeros_seconds


def test_reports_identical_across_processes(tmp_path):
    import pathlib
    import subprocess
    import sys
    script = pathlib.Path(__file__).resolve().parents[1] / "scripts" / "run_acceptance.py"
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        proc = subprocess.run([sys.executable, str(script), "--out", str(d)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stdout + proc.stderr
    names = sorted(p.name for p in dirs[0].iterdir())
    assert len(names) == 10
    for name in names:
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name
