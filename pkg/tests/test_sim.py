import math

import numpy as np
import pytest

from swarmguard.geodesy import GeoCoordinate, LocalFrame, geodetic_to_local
from swarmguard.presets import hover_formation, patrol_formation
from swarmguard.sim import (
    GpsNoiseModel,
    OutOfRangeError,
    ScenarioConfig,
    ScenarioError,
    UavTruthState,
    UwbNoiseModel,
    Waypoint,
    gps_errors,
    sample_gps,
    sample_uwb,
    simulate,
    simulate_truth,
)

ORIGIN = GeoCoordinate(52.0, 14.0, 0.0)


def config(waypoints, **kw):
    kw.setdefault("seed", 0)
    return ScenarioConfig(n_uavs=len(waypoints), origin=ORIGIN, waypoints=waypoints, **kw)


def test_stationary_uavs_never_move():
    truth = simulate_truth(config([[Waypoint(0, 0, 10)], [Waypoint(30, 0, 10)]], duration_s=60))
    assert truth.positions.shape == (120, 2, 3)
    np.testing.assert_array_equal(truth.positions[:, 0], np.tile([0, 0, 10], (120, 1)))
    np.testing.assert_array_equal(truth.positions[:, 1], np.tile([30, 0, 10], (120, 1)))
    assert not truth.velocities.any()


def test_constant_velocity_leg():
    plans = [[Waypoint(0, 0, 10), Waypoint(100, 0, 10, 10.0)], [Waypoint(0, 50, 10)]]
    truth = simulate_truth(config(plans, duration_s=30))
    for k in range(21):
        np.testing.assert_allclose(truth.positions[k, 0], [0.5 * k * 10, 0, 10], atol=1e-9)
    # hovers once the last waypoint is reached
    np.testing.assert_allclose(truth.positions[-1, 0], [100, 0, 10], atol=1e-9)
    np.testing.assert_allclose(truth.velocities[5, 0], [10, 0, 0])


def test_default_duration_gives_3000_samples_per_pair():
    cfg = hover_formation(seed=3)
    result = simulate(cfg)
    assert cfg.n_epochs == 3000
    for pair in cfg.pairs():
        assert sum(r.pair == pair for r in result.ranging_reports) == 3000
    assert len(result.position_reports) == 3 * 3000
    times = sorted({r.time_ms for r in result.ranging_reports})
    assert times[:3] == [0, 500, 1000] and times[-1] == 1_499_500


def test_zero_bound_gps_equals_truth():
    frame = LocalFrame(ORIGIN)
    rng = np.random.default_rng(0)
    truth = UavTruthState(1, (12.0, -7.0, 33.0), (0, 0, 0), 500)
    report = sample_gps(truth, GpsNoiseModel(horizontal_bound_m=0, vertical_bound_m=0), rng, frame)
    assert geodetic_to_local(frame, report.coordinate) == pytest.approx((12.0, -7.0, 33.0), abs=1e-9)
    assert report.time_ms == 500 and report.uav == 1


@pytest.mark.parametrize(
    "model,h_bound,v_bound",
    [
        (GpsNoiseModel(), 4.9, 4.9),
        (GpsNoiseModel("truncated-gaussian"), 4.9, 4.9),
        (GpsNoiseModel("rtk"), 0.03, 0.03),
    ],
)
def test_gps_noise_bounds(model, h_bound, v_bound):
    err = gps_errors(model, np.random.default_rng(11), 10_000)
    assert err.shape == (10_000, 3)
    horizontal = np.hypot(err[:, 0], err[:, 1])
    assert horizontal.max() <= h_bound
    assert np.abs(err[:, 2]).max() <= v_bound
    # the whole range is used, not a sliver of it
    assert horizontal.max() > 0.8 * h_bound


def test_bounded_uniform_magnitude_and_direction():
    err = gps_errors(GpsNoiseModel(), np.random.default_rng(4), 20_000)
    mag = np.hypot(err[:, 0], err[:, 1])
    assert mag.mean() == pytest.approx(2.45, abs=0.05)
    heading = np.arctan2(err[:, 1], err[:, 0])
    counts, _ = np.histogram(heading, bins=8, range=(-math.pi, math.pi))
    assert counts.min() > 0.9 * counts.mean()


def test_emitted_fixes_respect_bound():
    cfg = patrol_formation(seed=8, duration_s=200)
    result = simulate(cfg)
    frame = cfg.frame
    for r in result.position_reports:
        k = r.time_ms // 500
        e, n, u = geodetic_to_local(frame, r.coordinate)
        true = result.truth.positions[k, r.uav - 1]
        assert math.hypot(e - true[0], n - true[1]) <= 4.9 + 1e-6
        assert abs(u - true[2]) <= 4.9 + 1e-4


def _truth_pair(sep):
    return UavTruthState(1, (0, 0, 50), (0, 0, 0), 0), UavTruthState(2, (sep, 0, 50), (0, 0, 0), 0)


def test_uwb_noiseless_and_out_of_range():
    rng = np.random.default_rng(0)
    r = sample_uwb(*_truth_pair(10.0), UwbNoiseModel(error_bound_m=0), rng)
    assert r.distance_m == 10.0 and r.pair == (1, 2)
    with pytest.raises(OutOfRangeError):
        sample_uwb(*_truth_pair(151.0), UwbNoiseModel(), rng)


def test_uwb_within_bound():
    rng = np.random.default_rng(21)
    a, b = _truth_pair(50.0)
    values = [sample_uwb(a, b, UwbNoiseModel(), rng).distance_m for _ in range(10_000)]
    assert min(values) >= 49.7 and max(values) <= 50.3
    assert max(values) - min(values) > 0.55


def test_out_of_range_pairs_are_skipped():
    plans = [[Waypoint(0, 0, 50)], [Waypoint(151, 0, 50)], [Waypoint(0, 40, 50)]]
    result = simulate(config(plans, duration_s=10))
    assert {r.pair for r in result.ranging_reports} == {(1, 3)}
    assert result.out_of_range == 20


def test_determinism_and_seed_sensitivity():
    a, b = simulate(hover_formation(seed=5, duration_s=50)), simulate(hover_formation(seed=5, duration_s=50))
    assert a.messages() == b.messages()
    c = simulate(hover_formation(seed=6, duration_s=50))
    assert a.messages() != c.messages()


def test_separation_violation_names_pair_and_time():
    plans = [[Waypoint(0, 0, 50)], [Waypoint(20, 0, 50), Waypoint(0, 0, 50, 2.0)]]
    with pytest.raises(ScenarioError, match=r"UAVs 1 and 2.*t=\d+"):
        simulate_truth(config(plans, min_separation_m=5, duration_s=20))


@pytest.mark.parametrize(
    "kw",
    [dict(seed=-1), dict(duration_s=0), dict(ranging_rate_hz=0), dict(topology="ring")],
)
def test_config_validation(kw):
    with pytest.raises(ScenarioError):
        config([[Waypoint(0, 0, 50)], [Waypoint(20, 0, 50)]], **kw)


def test_truth_csv_header_and_rows():
    truth = simulate_truth(config([[Waypoint(0, 0, 10)], [Waypoint(30, 0, 10)]], duration_s=1))
    lines = truth.to_csv().splitlines()
    assert lines[0].startswith("time_ms,uav_id,")
    assert len(lines) == 1 + 2 * 2
    assert "np." not in truth.to_csv()
