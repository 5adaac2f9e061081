import json
import math

import pytest

import physid


def test_presets_listed():
    names = physid.preset_names("iris")
    assert len(names) == 22
    assert "pend_45" in names
    with pytest.raises(physid.DomainError):
        physid.preset_names("nope")


def test_preset_clip_is_deterministic():
    a = physid.preset_clip("drop_100", seed=3)
    b = physid.preset_clip("drop_100", seed=3)
    assert a["trajectory"].positions == b["trajectory"].positions
    assert a["split"] in ("train", "val", "test")


def test_rollout_and_fit_recover_decay():
    tr = physid.rollout("first_order_decay", [2.0], [1.0], dt=0.01, steps=200, integrator="rk4")
    assert len(tr) == 201
    assert tr.positions[100] == pytest.approx(math.exp(-2.0), rel=1e-8)
    est = physid.direct_fit(tr, "first_order_decay")
    assert est[0] == pytest.approx(2.0, rel=0.02)


def test_fit_returns_curves():
    tr = physid.rollout("second_order_linear", [1.0, 0.1], [1.0], [0.0], dt=1 / 60, steps=300,
                        integrator="euler")
    r = physid.fit(tr, "second_order_linear", epochs=50)
    assert r["names"] == physid.param_names("second_order_linear")
    assert len(r["loss_curve"]) == 50
    assert not r["diverged"]
    with pytest.raises(physid.ParseError):
        physid.fit(tr, "second_order_linear", integrator="leapfrog")


def test_closed_forms():
    assert physid.elliptic_k(0.0) == pytest.approx(math.pi / 2)
    t = physid.exact_period(0.5, 9.81, math.radians(45))
    assert t > physid.small_angle_period(0.5, 9.81)
    small, corrected = physid.corrected_length(t, math.radians(45))
    assert corrected == pytest.approx(0.5, rel=1e-9)
    assert small > corrected


def test_metrics():
    m, sigma, n = physid.mae([1.0, 3.0], 2.0)
    assert (m, n) == (1.0, 2)
    c = physid.confusion(["a", "a", "b"], ["a", "b", "b"])
    assert c["accuracy"] == pytest.approx(2 / 3)


def test_cli_roundtrip(tmp_path):
    out = tmp_path / "data"
    code, _, err = physid.cli(["simulate", "--preset", "drop_100", "--out", str(out)])
    assert code == 0, err
    params = json.loads((out / "parameters.json").read_text())
    assert params
    trial = out / "dropping_ball" / "drop_100" / "trial_0.csv"
    assert trial.read_text().count("\n") > 10
    code, _, _ = physid.cli(["simulate", "--preset", "no_such_preset", "--out", str(out)])
    assert code != 0
