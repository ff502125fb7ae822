"""Ready-made swarms and attacks.

The attack presets assume :func:`hover_formation` with three UAVs:
UAV 1 at the frame origin, UAV 2 20 m east, UAV 3 20 m north, all at 50 m.
"""

from __future__ import annotations

import math

from swarmguard.attack import AttackScenario, ConstantOffset, FixedPoint, Transmitter
from swarmguard.config import ExperimentSpec
from swarmguard.detection import ThresholdConfig
from swarmguard.geodesy import GeoCoordinate, LocalFrame, local_to_geodetic
from swarmguard.sim import GpsNoiseModel, ScenarioConfig, UwbNoiseModel, Waypoint

ORIGIN = GeoCoordinate(52.0, 14.0, 0.0)
ALTITUDE_M = 50.0
DEFAULT_WINDOW_MS = (300_000, 900_000)


def formation_offsets(n_uavs: int, spacing_m: float) -> list[tuple[float, float]]:
    """Grid slots, row-major; three UAVs form an L (1 at the corner)."""
    cols = math.ceil(math.sqrt(n_uavs))
    return [(spacing_m * (i % cols), spacing_m * (i // cols)) for i in range(n_uavs)]


def hover_formation(
    seed: int = 0,
    n_uavs: int = 3,
    spacing_m: float = 20.0,
    duration_s: float = 1500.0,
    gps_noise: GpsNoiseModel | None = None,
    uwb_noise: UwbNoiseModel | None = None,
    topology: str = "anchor",
    min_separation_m: float = 12.0,
) -> ScenarioConfig:
    offsets = formation_offsets(n_uavs, spacing_m)
    return ScenarioConfig(
        seed=seed,
        n_uavs=n_uavs,
        origin=ORIGIN,
        waypoints=[[Waypoint(e, n, ALTITUDE_M)] for e, n in offsets],
        duration_s=duration_s,
        min_separation_m=min_separation_m,
        gps_noise=gps_noise or GpsNoiseModel(),
        uwb_noise=uwb_noise or UwbNoiseModel(),
        topology=topology,
    )


def patrol_formation(
    seed: int = 0,
    n_uavs: int = 3,
    spacing_m: float = 20.0,
    side_m: float = 100.0,
    speed_mps: float = 5.0,
    duration_s: float = 1500.0,
    gps_noise: GpsNoiseModel | None = None,
    uwb_noise: UwbNoiseModel | None = None,
    topology: str = "anchor",
    min_separation_m: float = 12.0,
) -> ScenarioConfig:
    """Rigid formation flying laps of a square at constant speed."""
    corners = [(0.0, 0.0), (side_m, 0.0), (side_m, side_m), (0.0, side_m)]
    laps = math.ceil(duration_s * speed_mps / (4 * side_m)) + 1
    path = [corners[i % 4] for i in range(4 * laps + 1)]
    waypoints = []
    for de, dn in formation_offsets(n_uavs, spacing_m):
        plan = [Waypoint(path[0][0] + de, path[0][1] + dn, ALTITUDE_M)]
        plan += [Waypoint(e + de, n + dn, ALTITUDE_M, speed_mps) for e, n in path[1:]]
        waypoints.append(plan)
    return ScenarioConfig(
        seed=seed,
        n_uavs=n_uavs,
        origin=ORIGIN,
        waypoints=waypoints,
        duration_s=duration_s,
        min_separation_m=min_separation_m,
        gps_noise=gps_noise or GpsNoiseModel(),
        uwb_noise=uwb_noise or UwbNoiseModel(),
        topology=topology,
    )


def _local(e, n, u=ALTITUDE_M) -> GeoCoordinate:
    return local_to_geodetic(LocalFrame(ORIGIN), e, n, u)


def identical_signal_attack(window=DEFAULT_WINDOW_MS, jitter_m: float = 0.0, target=(200.0, 200.0)) -> AttackScenario:
    """One transmitter capturing UAVs 2 and 3 with one fixed-point signal."""
    tx = Transmitter((30.0, 30.0, ALTITUDE_M), 35.0, FixedPoint(_local(*target)), jitter_m)
    return AttackScenario((tx,), window)


def single_victim_offset_attack(
    offset_m: float = 50.0, window=DEFAULT_WINDOW_MS, jitter_m: float = 0.5
) -> AttackScenario:
    """UAV 2 alone reports its own position shifted ``offset_m`` north."""
    tx = Transmitter((25.0, 0.0, ALTITUDE_M), 10.0, ConstantOffset(0.0, offset_m, 0.0), jitter_m)
    return AttackScenario((tx,), window)


def divergent_attack(separation_m: float = 500.0, window=DEFAULT_WINDOW_MS, jitter_m: float = 0.5) -> AttackScenario:
    """Two transmitters, one victim each, spoofing points ``separation_m`` apart."""
    half = separation_m / 2.0
    t1 = Transmitter((25.0, 0.0, ALTITUDE_M), 10.0, FixedPoint(_local(-half, 0.0)), jitter_m)
    t2 = Transmitter((0.0, 25.0, ALTITUDE_M), 10.0, FixedPoint(_local(half, 0.0)), jitter_m)
    return AttackScenario((t1, t2), window)


def far_fixed_point_attack(distance_m: float = 1000.0, window=DEFAULT_WINDOW_MS, jitter_m: float = 0.5) -> AttackScenario:
    """UAV 2 dragged to a fixed point ``distance_m`` east of the swarm."""
    tx = Transmitter((25.0, 0.0, ALTITUDE_M), 10.0, FixedPoint(_local(distance_m, 0.0)), jitter_m)
    return AttackScenario((tx,), window)


def preset_experiment(name: str, seed: int = 0, trials: int = 1) -> ExperimentSpec:
    """Named experiment bundles used by the CLI ``--preset`` flag."""
    safe = ThresholdConfig.preset("safe")
    if name == "benign":
        return ExperimentSpec(patrol_formation(seed), None, safe, trials)
    if name == "identical-signal":
        return ExperimentSpec(hover_formation(seed, topology="all-pairs"), identical_signal_attack(), safe, trials)
    if name == "constant-offset":
        return ExperimentSpec(hover_formation(seed), single_victim_offset_attack(), safe, trials)
    if name == "divergent":
        return ExperimentSpec(hover_formation(seed), divergent_attack(), safe, trials)
    if name == "fixed-point":
        return ExperimentSpec(hover_formation(seed), far_fixed_point_attack(), safe, trials)
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")


PRESETS = ("benign", "identical-signal", "constant-offset", "divergent", "fixed-point")
