import math

import numpy as np
import pytest

import nldelay


def test_presets_listed():
    names = nldelay.preset_names()
    assert "shock" in names and "delay-limit-sin" in names
    s = nldelay.preset("shock")
    assert s.scheme == "hw"
    assert s.boundary == "free-flow"


def test_config_round_trip():
    s = nldelay.preset("box-refine")
    again = nldelay.parse_scenario(s.to_config())
    assert again.to_config() == s.to_config()


def test_bad_config_raises():
    with pytest.raises(nldelay.ConfigError):
        nldelay.parse_scenario("[domain]\ndx = 0.01\n")


def test_simulate_shock():
    s = nldelay.preset("shock")
    out = nldelay.simulate(s)
    assert out["passed"]
    assert out["final"].shape == out["x"].shape == (200,)
    assert math.isclose(out["final_time"], 0.5)
    rec = out["records"]
    assert np.all(rec["tv"] <= rec["tv_bound"])
    assert out["min"] >= -1e-12


def test_constant_state_is_fixed():
    s = nldelay.preset("delay-limit-sin")
    s.initial = "constant:value=0.4"
    s.horizon = 0.05
    s.snapshots = [0.0, 0.05]
    out = nldelay.simulate(s, scheme="lf")
    assert np.array_equal(out["final"], out["initial"])


def test_single_step_conserves_on_periodic():
    s = nldelay.preset("rarefaction")
    s.boundary = "periodic"
    s.scheme = "lf"
    rng = np.random.default_rng(7)
    rho = rng.uniform(0.0, 1.7, 200)
    out = nldelay.single_step(s, rho, rho)
    assert abs(out["level"].sum() - rho.sum()) <= 1e-12 * rho.sum()
    assert out["level"].min() >= 0.0


def test_norms():
    level = np.array([0.0, 1.0, 0.5])
    assert nldelay.total_variation(level) == 1.5
    assert nldelay.total_variation(level, "periodic") == 2.0
    assert nldelay.l1_norm(level, 0.5) == 0.75
    assert math.isclose(nldelay.tv_bound(1.0, 0.0, 1.0, 1.0), math.exp(2.0))
