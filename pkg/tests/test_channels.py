"""Channel generator checks: path-loss profiles, fading statistics,
determinism, and the CSV round trip."""

import numpy as np
import pytest

from oceanfl import (ChannelScenario, generate_channels, load_channels_csv,
                     save_channels_csv, scenario_from_kind, scenario_gain_floor)
from oceanfl.channels import (GAIN_FLOOR, RAMP_PATHLOSS_DB, STATIC_PATHLOSS_DB,
                              pathloss_db_profile)

GAIN_36DB = 2.5118864315095801111e-4  # 10^(-36/10)


def test_static_without_fading_is_flat():
    scen = scenario_from_kind("static", fading="none", seed=5)
    ch = generate_channels(scen, 5, 3)
    assert ch.shape == (5, 3)
    assert ch == pytest.approx(np.full((5, 3), GAIN_36DB), rel=1e-15)


def test_ramp_profiles_hit_their_endpoints():
    up = scenario_from_kind("pathloss_ramp_up", fading="none")
    down = scenario_from_kind("pathloss_ramp_down", fading="none")
    lo, hi = RAMP_PATHLOSS_DB
    prof_up = pathloss_db_profile(up, 3)
    assert prof_up == pytest.approx([lo, (lo + hi) / 2.0, hi])
    assert pathloss_db_profile(down, 3) == pytest.approx([hi, (lo + hi) / 2.0, lo])
    assert pathloss_db_profile(up, 1) == pytest.approx([lo])
    # gains worsen monotonically as the loss ramps up
    ch = generate_channels(up, 10, 2)
    assert np.all(np.diff(ch[:, 0]) < 0.0)
    assert ch[0, 0] == pytest.approx(10.0 ** (-lo / 10.0), rel=1e-15)
    assert ch[-1, 0] == pytest.approx(10.0 ** (-hi / 10.0), rel=1e-15)


def test_fading_is_deterministic_in_seed():
    a = generate_channels(scenario_from_kind("static", seed=3), 20, 4)
    b = generate_channels(scenario_from_kind("static", seed=3), 20, 4)
    c = generate_channels(scenario_from_kind("static", seed=4), 20, 4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_fading_is_unit_mean_and_floored():
    ch = generate_channels(scenario_from_kind("static", seed=0), 4000, 5)
    g = ch / GAIN_36DB
    assert abs(float(np.mean(g)) - 1.0) < 0.05  # 20k exponential draws
    assert np.all(ch > 0.0)
    assert np.all(g >= GAIN_FLOOR * (1.0 - 1e-12))
    # heavy lower tail: deep fades below 1% of mean do occur
    assert float(np.min(g)) < 0.01


def test_scenario_validation():
    with pytest.raises(ValueError):
        scenario_from_kind("urban")
    with pytest.raises(ValueError):
        scenario_from_kind("static", fading="rician")
    with pytest.raises(ValueError):
        ChannelScenario("static", 36.0, 40.0)  # static needs equal endpoints
    with pytest.raises(ValueError):
        ChannelScenario("pathloss_ramp_up", 45.0, 32.0)
    with pytest.raises(ValueError):
        ChannelScenario("static", -3.0, -3.0)


def test_scenario_gain_floor_uses_worst_endpoint():
    static = scenario_from_kind("static")
    assert scenario_gain_floor(static) == pytest.approx(GAIN_36DB * GAIN_FLOOR, rel=1e-12)
    ramp = scenario_from_kind("pathloss_ramp_up")
    worst = 10.0 ** (-max(RAMP_PATHLOSS_DB) / 10.0)
    assert scenario_gain_floor(ramp) == pytest.approx(worst * GAIN_FLOOR, rel=1e-12)
    dry = scenario_from_kind("pathloss_ramp_down", fading="none")
    assert scenario_gain_floor(dry) == pytest.approx(worst, rel=1e-12)
    assert STATIC_PATHLOSS_DB == 36.0


def test_csv_round_trip_is_exact(tmp_path):
    ch = generate_channels(scenario_from_kind("static", seed=9), 7, 3)
    path = tmp_path / "channels.csv"
    save_channels_csv(ch, path)
    back = load_channels_csv(path)
    assert np.array_equal(ch, back)  # repr() floats survive bit for bit


def test_csv_loader_rejects_malformed_files(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("round,client,h_squared\n0,0,0.5\n0,0,0.5\n")
    with pytest.raises(ValueError):
        load_channels_csv(path)  # duplicate cell
    path.write_text("round,client,h_squared\n0,0,0.5\n1,1,0.5\n")
    with pytest.raises(ValueError):
        load_channels_csv(path)  # not a dense grid
    path.write_text("wrong,header\n")
    with pytest.raises(ValueError):
        load_channels_csv(path)
    path.write_text("round,client,h_squared\n0,0,-0.5\n")
    with pytest.raises(ValueError):
        load_channels_csv(path)
