import math

import pytest

import hcran


def test_version_and_rng():
    assert hcran.__version__ == "1.0.0"
    assert hcran.RNG == "mt19937_64+splitmix64/v1"


def test_path_loss():
    assert hcran.path_loss_db("rrh-rue", 50.0) == pytest.approx(99.4588, abs=1e-4)
    assert hcran.path_loss_db("hpn-rue", 1.0) == 31.5
    with pytest.raises(hcran.ConfigError):
        hcran.path_loss_db("rrh-rue", 0.0)


def test_scenario_defaults():
    cfg = hcran.ScenarioConfig()
    assert cfg.k_total == 25
    assert cfg.b0 == 200e3
    assert cfg.delta0 > 0
    cfg.eta_hue_db = 20.0
    assert cfg.delta0 < hcran.ScenarioConfig().delta0


def test_channel_shape():
    ch = hcran.channel(hcran.ScenarioConfig(), seed=3, snapshot=1)
    assert len(ch["sigma"]) == 13
    assert len(ch["sigma"][0]) == 25
    assert all(x >= 0 for row in ch["sigma"] for x in row)


def test_solve_snapshot():
    sol = hcran.solve_snapshot(seed=1, snapshot=0)
    assert sol["feasible"]
    assert sol["converged"]
    assert sol["ee"] == pytest.approx(sol["rate"] / sol["power"])
    gammas = sol["gammas"]
    assert gammas[0] == 0.0
    assert all(b > a for a, b in zip(gammas, gammas[1:]))
    assert 0 <= sol["gap"] < 0.05
    fixed = hcran.solve_snapshot(seed=1, snapshot=0, algorithm="fixed-power")
    if fixed["feasible"]:
        assert fixed["ee"] <= sol["ee"] * (1 + 1e-6)
    with pytest.raises(hcran.ConfigError):
        hcran.solve_snapshot(algorithm="greedy")


def test_tiny_oracle():
    for i in range(5):
        r = hcran.tiny_check(2, i)
        assert r["rbs"] <= 6 and r["ues"] <= 3
        assert r["solver_ee"] <= r["oracle_ee"] * (1 + 1e-9)
        assert r["solver_ee"] >= 0.98 * r["oracle_ee"]


def test_run_config_and_determinism():
    text = "[experiment]\nalgorithms = optimal, fixed-power\nsweep = eta_hue_db\nvalues = 0, 10\n"
    a = hcran.run_config(text, snapshots=2, seed=4)
    b = hcran.run_config(text, snapshots=2, seed=4, workers=2)
    assert repr(a) == repr(b)
    assert len(a["rows"]) == 2 * 2 * 2
    for s in a["summary"]:
        assert s["samples"] + s["infeasible"] + s["failed"] == 2
        if s["samples"] == 0:
            assert math.isnan(s["mean_ee"])


def test_config_errors():
    with pytest.raises(hcran.ConfigError, match="qos.nope"):
        hcran.run_config("[qos]\nnope = 1\n")
    assert "[experiment]" in hcran.figure_config(5)


def test_run_figure_and_verify():
    t = hcran.run_figure(7, snapshots=2)
    assert {r["sweep_value"] for r in t["rows"]} == {0.2, 0.4, 0.6, 0.8}
    res = hcran.verify(criteria=[2, 4], snapshots=3, tiny=5)
    assert [r["id"] for r in res] == [2, 4]
    assert all(r["passed"] for r in res)
