import json
from pathlib import Path

import pytest

import magcheck

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def test_version_and_schema():
    assert magcheck.__version__ == "0.1.0"
    assert magcheck.SCHEMA_VERSION == 1


def test_catalog_lists_entries():
    names = {e["name"] for e in magcheck.catalog()}
    assert {"minkowski", "schwarzschild", "kaluza-reissner-nordstrom", "random-analytic"} <= names


def test_checks_registry():
    ids = [c[0] for c in magcheck.checks()]
    assert "identity-2-11" in ids
    assert "gauge-invariance" in ids


def test_minkowski_passes():
    rep = magcheck.run_file(SCENARIOS / "minkowski.json")
    assert rep["pass"] is True
    assert rep["records"]
    assert all(r["max_abs_residual"] == 0.0 for r in rep["records"])


def test_dict_scenario_and_overrides():
    doc = {
        "scenario": "py-random",
        "catalog": [{"name": "random-analytic", "params": {"dim": 3}}],
        "checks": ["identity-2-11", "structure-eqs"],
        "points": 5,
    }
    a = magcheck.run(doc, seed=7, strategy="fd2", include_timing=False)
    b = magcheck.run(json.dumps(doc), seed=7, strategy="fd2", include_timing=False)
    assert a == b
    env = a["environment"]
    assert env["seed"] == 7 and env["strategy"] == "fd2" and env["points"] == 5
    assert "wall_time_s" not in a
    assert a["pass"] is True


def test_negative_control_fails():
    rep = magcheck.run_file(SCENARIOS / "negative_kappa.json")
    assert rep["pass"] is False


def test_summary_text():
    text = magcheck.summary((SCENARIOS / "minkowski.json").read_text())
    assert "PASS" in text


def test_errors_carry_codes():
    with pytest.raises(magcheck.MagError) as info:
        magcheck.run({"scenario": "bad", "catalog": ["nowhere"], "checks": ["el-metric"]})
    assert info.value.code == "CatalogMiss"
    with pytest.raises(magcheck.MagError) as info:
        magcheck.run({"scenario": "bad", "catalog": ["minkowski"], "checks": ["nope"]})
    assert info.value.code == "ConfigParseError"
    with pytest.raises(magcheck.MagError):
        magcheck.run("{not json")
