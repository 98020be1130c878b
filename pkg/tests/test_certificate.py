import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from hoferbound.certificate import (
    asymptotic_slope,
    emit_report,
    parse_report,
    plot_profile,
    require_nonvacuous,
    run_certificate,
)
from hoferbound.errors import AssumptionViolated, BadParameters, ScenarioError, SandwichVacuous
from hoferbound.profile import make_bump
from hoferbound.scenario import load_scenario, parse_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
MIXED = [4, -6, 1, 2, -4]
C_S3 = 2 * 0.5 * (2 * math.pi - 1)


@pytest.fixture(scope="module")
def s3():
    return load_scenario(SCENARIOS / "s3_mixed_bands.json")


@pytest.fixture(scope="module")
def t3():
    return load_scenario(SCENARIOS / "t3_single_band.json")


def test_constants_s3(s3):
    r = run_certificate(s3)
    assert r.l_k == pytest.approx(1.0)
    assert r.L == pytest.approx(2 * math.pi - 1)
    assert r.C0 == pytest.approx(C_S3)
    assert r.A == pytest.approx(-1.0 / (2 * make_bump(0.5, 0.05)(0.375, 1)))
    assert r.C == max(r.C0, r.A) and r.C0 > 0 and r.A > 0


def test_s3_m20_all_pass(s3):
    r = run_certificate(s3.with_coefficients([20 * v for v in MIXED]))
    assert r.all_pass
    assert r.B_low >= 120 - r.C - 1e-9
    assert r.osc == 200
    assert not r.vacuous


def test_zero_difference(s3):
    r = run_certificate(s3.with_coefficients(MIXED, MIXED))
    assert r.generators == () and r.B_low == 0 and r.osc == 0
    assert r.vacuous
    with pytest.raises(SandwichVacuous):
        require_nonvacuous(r)


def test_t3_deep_witness_and_brute_force(t3):
    for scale in (1.0, 2.0):
        r = run_certificate(t3.with_coefficients([0, -6 * scale]), brute_force=True)
        deep = next(v for v in r.verdicts if v.name == "deep-low")
        assert deep.applicable and deep.passed
        assert any(g["grading"] == r.d - r.k and g["action"] <= -6 * scale for g in r.generators)
        assert r.brute_force["status"] == "ok"
        assert r.brute_force["min_depth"] == pytest.approx(r.B_low, abs=1e-12)


def test_homomorphism_shadow(s3):
    a, b = [3, -2, 5], [1, 1, -1]
    r1 = run_certificate(s3.with_coefficients(a, b))
    r2 = run_certificate(s3.with_coefficients(np.subtract(a, b).tolist()))
    assert r1.generators == r2.generators
    assert r1.B_low == r2.B_low and r1.osc == r2.osc


def test_deterministic_json(s3):
    assert emit_report(run_certificate(s3)) == emit_report(run_certificate(s3))


def test_json_round_trip(s3):
    r = run_certificate(s3)
    text = emit_report(r, "json")
    assert parse_report(text) == r
    assert emit_report(parse_report(text), "json") == text


def test_markdown_rows(s3):
    r = run_certificate(s3)
    md = emit_report(r, "markdown")
    for v in r.verdicts:
        assert sum(1 for line in md.splitlines() if line.startswith(f"| {v.name} |")) == 1


def test_csv_sorted(s3):
    rows = list(csv.DictReader(io.StringIO(emit_report(run_certificate(s3), "csv"))))
    keys = [(int(r["grading"]), float(r["action"])) for r in rows]
    assert keys == sorted(keys) and len(rows) > 0


def test_unknown_format(s3):
    with pytest.raises(ValueError):
        emit_report(run_certificate(s3), "xml")


def test_both_clauses_reported(s3):
    cert = run_certificate(s3).certificate
    assert cert["bound"] == max(cert["direct_bound"], cert["opposite_bound"])
    assert cert["clause"] in ("direct", "opposite")


def test_slope_mixed_bands(s3):
    rows = asymptotic_slope(s3, MIXED, 10)
    lower = [r["lower"] for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(lower, lower[1:]))
    assert all(r["upper"] == 10 for r in rows)
    for r in rows:
        assert r["lower"] >= 6 - r["C"] / r["m"] - 1e-9
        assert abs(r["lower"] - 6) <= r["C"] / r["m"] + 1e-9
        assert r["ok"]


def test_slope_unit_vector(s3):
    rows = asymptotic_slope(s3, [1.0], 8)
    assert all(r["upper"] == 1 for r in rows)
    late = [r for r in rows if r["m"] > C_S3]
    assert late and all(abs(r["lower"] - 1) <= C_S3 / r["m"] for r in late)


def test_slope_zero(s3):
    rows = asymptotic_slope(s3, [], 3)
    assert all(r["lower"] == 0 and r["upper"] == 0 for r in rows)


def test_plot_peaks(s3):
    data = np.loadtxt(io.StringIO(plot_profile(s3, MIXED, 2**12 * 5 + 1)), delimiter=",", skiprows=1)
    s, f = data[:, 0], data[:, 1]
    for j, aj in enumerate(MIXED):
        i = np.argmin(np.abs(s - 0.75 * 2.0**-j * 0.5))
        assert f[i] == pytest.approx(aj, abs=1e-9)


def test_plot_sampling_bound(s3):
    res = 500
    data = np.loadtxt(io.StringIO(plot_profile(s3, MIXED, res)), delimiter=",", skiprows=1)
    from hoferbound.profile import make_profile

    slope = make_profile(make_bump(0.5, 0.05), MIXED).max_slope
    spread = data[:, 1].max() - data[:, 1].min()
    assert abs(spread - 10) <= 2 * slope * 0.5 / res
    zero = np.loadtxt(io.StringIO(plot_profile(s3, [], 20)), delimiter=",", skiprows=1)
    assert np.all(zero[:, 1:] == 0)


def test_assumption_failure_propagates():
    s = load_scenario(SCENARIOS / "t2_point.json")
    with pytest.raises(AssumptionViolated):
        run_certificate(s)


def test_scenario_validation():
    base = json.loads((SCENARIOS / "s3_mixed_bands.json").read_text())
    with pytest.raises(ScenarioError):
        parse_scenario({**base, "schema": 2})
    with pytest.raises(BadParameters):
        parse_scenario({**base, "k": 1})
    with pytest.raises(ScenarioError):
        parse_scenario({k: v for k, v in base.items() if k != "manifold"})
    with pytest.raises(ScenarioError):
        parse_scenario({**base, "manifold": {"family": "hyperbolic"}})
    with pytest.raises(ScenarioError):
        load_scenario(SCENARIOS / "missing.json")


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_scenarios_load(path):
    assert load_scenario(path).name
