"""Smoke tests for the python bindings; the simulator itself is covered by
the C++ suites."""

import math

import pytest

import dagsim


def tiny(name="honest-baseline", **overrides):
    cfg = dagsim.scenario(name)
    cfg.update(
        nodes=12,
        degree=4,
        duration=10.0,
        runs=1,
        content_nodes=[3, 6],
        inactive_nodes=[11],
        reputation_changes=[],
        churn=[],
        attackers=[a for a in cfg["attackers"] if a["node"] < 12],
    )
    cfg.update(overrides)
    return cfg


def test_builtin_scenarios_listed():
    names = dagsim.builtin_scenarios()
    assert "honest-baseline" in names
    assert "multi-rate-repeer" in names
    for name in names:
        assert dagsim.validate(name)


def test_zipf_weights_normalized():
    w = dagsim.zipf_weights(50, 0.9)
    assert len(w) == 50
    assert math.isclose(sum(w), 1.0, rel_tol=1e-9)
    assert w[0] == max(w)


def test_run_returns_metrics():
    result = dagsim.run(tiny(), seed=3)
    assert result["nodes"] == 12
    assert result["issued"] > 0
    assert result["disseminated"] > 0
    assert len(result["time"]) == len(result["total_dr"])
    assert result["consistency_violations"] == 0
    assert result["violations"] == []


def test_determinism_same_seed():
    a = dagsim.run(tiny(), seed=5)
    b = dagsim.run(tiny(), seed=5)
    assert a == b
    c = dagsim.run(tiny(), seed=6)
    assert c["total_dr"] != a["total_dr"]


def test_run_batch_multiple_seeds():
    out = dagsim.run_batch(tiny(), seed=1, runs=2)
    assert len(out["runs"]) == 2
    assert out["runs"][0]["seed"] == 1
    assert out["runs"][1]["seed"] == 2


def test_attack_scenario_blacklists():
    cfg = tiny("spam-no-repeer", duration=30.0)
    cfg["attackers"] = [
        {"node": 4, "spam_factor": 10.0, "multi_rate": False, "repeer": False}
    ]
    result = dagsim.run(cfg, seed=2)
    assert result["blacklist_events"]
    assert result["honest_honest_blacklists"] == 0


def test_bad_config_raises():
    with pytest.raises(ValueError):
        dagsim.validate('{"no_such_key": 1}')
    with pytest.raises(ValueError):
        dagsim.run({"nodes": 1}, seed=1)


def test_write_outputs(tmp_path):
    ok = dagsim.write_outputs(tiny(), seed=1, out_dir=str(tmp_path), emit_plots=True)
    assert ok
    for name in ["dr.csv", "latency.csv", "inbox.csv", "blacklist.csv",
                 "aggregate.csv", "summary.json", "scenario.json", "dr.gp"]:
        assert (tmp_path / name).exists()
