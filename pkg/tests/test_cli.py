import json
import subprocess
import sys
from pathlib import Path

import pytest

from hoferbound.cli import EXIT_ERROR, EXIT_OK, EXIT_VERDICT, main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
S3 = str(SCENARIOS / "s3_mixed_bands.json")
T3 = str(SCENARIOS / "t3_single_band.json")
T2_POINT = str(SCENARIOS / "t2_point.json")


def test_verify_assumption(capsys):
    assert main(["verify-assumption", S3]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["holds"] and rep["clauses"]["iv"] and rep["l_k"] == pytest.approx(1.0)


def test_verify_assumption_failure(capsys):
    assert main(["verify-assumption", T2_POINT]) == EXIT_VERDICT
    assert json.loads(capsys.readouterr().out)["clauses"]["iv"] is False


def test_enumerate(capsys):
    assert main(["enumerate", T3]) == EXIT_OK
    assert len(json.loads(capsys.readouterr().out)["generators"]) == 4


def test_certify_json_and_brute_force(capsys):
    assert main(["certify", T3, "--brute-force"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["brute_force"]["status"] == "ok"


def test_certify_assumption_failure_exit(capsys):
    assert main(["certify", T2_POINT]) == EXIT_VERDICT
    assert "AssumptionViolated" in capsys.readouterr().err


def test_certify_bad_scenario(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 2}')
    assert main(["certify", str(bad)]) == EXIT_ERROR
    assert "ScenarioError" in capsys.readouterr().err
    bad.write_text("not json")
    assert main(["enumerate", str(bad)]) == EXIT_ERROR


def test_certify_batch_parallel(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("HOFERBOUND_WORKERS", "2")
    out = tmp_path / "r.md"
    assert main(["certify", S3, T3, "--format", "markdown", "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.count("# Certificate report") == 2


def test_batch_worst_exit_code(capsys):
    assert main(["certify", S3, T2_POINT]) == EXIT_VERDICT


def test_slope(capsys):
    assert main(["slope", S3, "--m-max", "3"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "m,lower,upper,floor,C,ok" and len(lines) == 4


def test_plot(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["plot", S3, "--resolution", "50", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "s,f,fprime,fsecond" and len(lines) == 51
    assert main(["plot", S3, "--resolution", "1"]) == EXIT_ERROR


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hoferbound.cli", "certify", S3, "--format", "markdown"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == EXIT_OK
    assert "| lower-bound | pass |" in proc.stdout
