"""Deterministic swarm simulation: truth trajectories, GPS fixes and UWB ranging.

Everything random draws from generators derived from ``ScenarioConfig.seed``
through :class:`numpy.random.SeedSequence`, so a (seed, config) pair fully
determines every report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from itertools import combinations

import numpy as np

from swarmguard.geodesy import (
    GeoCoordinate,
    LocalFrame,
    LOCAL_FRAME_LIMIT_M,
    local_to_geodetic,
    local_to_geodetic_array,
)
from swarmguard.gcs.messages import PositionReport, RangingReport
from swarmguard.gcs.schedule import TOPOLOGIES, ranging_schedule

GPS_MODES = ("bounded-uniform", "truncated-gaussian", "rtk")


class ScenarioError(ValueError):
    """The scenario is invalid (bad config or a separation violation)."""


class OutOfRangeError(ValueError):
    """Two UAVs are too far apart to be ranged this epoch."""


@dataclass(frozen=True)
class GpsNoiseModel:
    mode: str = "bounded-uniform"
    horizontal_bound_m: float = 4.9
    vertical_bound_m: float = 4.9
    rtk_bound_m: float = 0.03

    def __post_init__(self):
        if self.mode not in GPS_MODES:
            raise ValueError(f"unknown GPS noise mode {self.mode!r}; expected one of {GPS_MODES}")
        for name in ("horizontal_bound_m", "vertical_bound_m", "rtk_bound_m"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def bounds(self) -> tuple[float, float]:
        """Effective (horizontal, vertical) error bounds for the active mode."""
        if self.mode == "rtk":
            return self.rtk_bound_m, self.rtk_bound_m
        return self.horizontal_bound_m, self.vertical_bound_m

    @property
    def fix_error_bound_m(self) -> float:
        """Largest possible 3-D error of a single fix."""
        h, v = self.bounds
        return math.hypot(h, v)


@dataclass(frozen=True)
class UwbNoiseModel:
    error_bound_m: float = 0.30
    max_range_m: float = 150.0

    def __post_init__(self):
        if not self.error_bound_m >= 0:
            raise ValueError("error_bound_m must be >= 0")
        if not self.max_range_m > 0:
            raise ValueError("max_range_m must be > 0")


@dataclass(frozen=True)
class Waypoint:
    east_m: float
    north_m: float
    up_m: float
    speed_mps: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.east_m, self.north_m, self.up_m], dtype=float)


@dataclass
class ScenarioConfig:
    seed: int
    n_uavs: int
    origin: GeoCoordinate
    waypoints: list[list[Waypoint]]
    duration_s: float = 1500.0
    ranging_rate_hz: float = 2.0
    min_separation_m: float = 2.0
    gps_noise: GpsNoiseModel = field(default_factory=GpsNoiseModel)
    uwb_noise: UwbNoiseModel = field(default_factory=UwbNoiseModel)
    topology: str = "anchor"

    def __post_init__(self):
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ScenarioError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.n_uavs < 2:
            raise ScenarioError("a swarm needs at least 2 UAVs")
        if len(self.waypoints) != self.n_uavs:
            raise ScenarioError(f"expected waypoint lists for {self.n_uavs} UAVs, got {len(self.waypoints)}")
        if not self.duration_s > 0:
            raise ScenarioError("duration_s must be > 0")
        if not self.ranging_rate_hz > 0:
            raise ScenarioError("ranging_rate_hz must be > 0")
        if self.min_separation_m < 0:
            raise ScenarioError("min_separation_m must be >= 0")
        if self.topology not in TOPOLOGIES:
            raise ScenarioError(f"unknown topology {self.topology!r}")
        for uav, plan in enumerate(self.waypoints, start=1):
            if not plan:
                raise ScenarioError(f"UAV {uav} has no waypoints")
            for wp in plan:
                if abs(wp.east_m) > LOCAL_FRAME_LIMIT_M or abs(wp.north_m) > LOCAL_FRAME_LIMIT_M:
                    raise ScenarioError(f"UAV {uav} waypoint {wp} outside the local frame bound")
            for prev, wp in zip(plan, plan[1:]):
                if wp.speed_mps <= 0 and np.linalg.norm(wp.position - prev.position) > 0:
                    raise ScenarioError(f"UAV {uav} needs a positive speed to reach {wp}")

    @property
    def frame(self) -> LocalFrame:
        return LocalFrame(self.origin)

    @property
    def n_epochs(self) -> int:
        return int(math.floor(self.duration_s * self.ranging_rate_hz + 1e-9))

    @property
    def period_ms(self) -> float:
        return 1000.0 / self.ranging_rate_hz

    def epoch_times_ms(self) -> np.ndarray:
        k = np.arange(self.n_epochs)
        return np.rint(k * self.period_ms).astype(np.int64)

    def pairs(self) -> list[tuple[int, int]]:
        return ranging_schedule(self.n_uavs, self.topology)

    def to_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "n_uavs": self.n_uavs,
            "origin": self.origin.to_dict(),
            "waypoints": [[asdict(wp) for wp in plan] for plan in self.waypoints],
            "duration_s": self.duration_s,
            "ranging_rate_hz": self.ranging_rate_hz,
            "min_separation_m": self.min_separation_m,
            "gps_noise": asdict(self.gps_noise),
            "uwb_noise": asdict(self.uwb_noise),
            "topology": self.topology,
        }


@dataclass(frozen=True)
class UavTruthState:
    uav: int
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    time_ms: int


@dataclass
class TruthTrail:
    """Truth positions/velocities on the epoch grid.

    ``positions[k, i]`` is UAV ``i + 1`` at ``times_ms[k]`` (east, north, up).
    """

    times_ms: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    @property
    def n_epochs(self) -> int:
        return len(self.times_ms)

    def state(self, epoch: int, uav: int) -> UavTruthState:
        p = self.positions[epoch, uav - 1]
        v = self.velocities[epoch, uav - 1]
        return UavTruthState(uav, tuple(map(float, p)), tuple(map(float, v)), int(self.times_ms[epoch]))

    def states(self, epoch: int) -> list[UavTruthState]:
        return [self.state(epoch, i + 1) for i in range(self.positions.shape[1])]

    def to_csv(self) -> str:
        lines = ["time_ms,uav_id,east_m,north_m,up_m"]
        for t, row in zip(self.times_ms.tolist(), self.positions.tolist()):
            for i, (e, n, u) in enumerate(row):
                lines.append(f"{t},{i + 1},{e!r},{n!r},{u!r}")
        return "\n".join(lines) + "\n"


def _trajectory(plan: list[Waypoint], t_s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    points = np.array([wp.position for wp in plan])
    legs = np.diff(points, axis=0)
    lengths = np.linalg.norm(legs, axis=1)
    speeds = np.array([wp.speed_mps for wp in plan[1:]], dtype=float)
    durations = np.divide(lengths, speeds, out=np.zeros_like(lengths), where=lengths > 0)
    ends = np.cumsum(durations)
    pos = np.repeat(points[-1][None, :], len(t_s), axis=0)
    vel = np.zeros((len(t_s), 3))
    start = 0.0
    for i in range(len(legs)):
        active = (t_s >= start) & (t_s < ends[i])
        if durations[i] > 0 and active.any():
            v = legs[i] / durations[i]
            pos[active] = points[i] + np.outer(t_s[active] - start, v)
            vel[active] = v
        start = ends[i]
    if len(plan) == 1:
        pos[:] = points[0]
    return pos, vel


def simulate_truth(config: ScenarioConfig) -> TruthTrail:
    """Sample every UAV's truth state on the ranging grid.

    Raises :class:`ScenarioError` at the first pair closer than
    ``min_separation_m``.
    """
    times_ms = config.epoch_times_ms()
    t_s = times_ms / 1000.0
    n = config.n_uavs
    positions = np.empty((len(times_ms), n, 3))
    velocities = np.empty_like(positions)
    for i, plan in enumerate(config.waypoints):
        positions[:, i], velocities[:, i] = _trajectory(plan, t_s)
    for a, b in combinations(range(n), 2):
        sep = np.linalg.norm(positions[:, a] - positions[:, b], axis=1)
        bad = np.flatnonzero(sep < config.min_separation_m)
        if bad.size:
            k = bad[0]
            raise ScenarioError(
                f"UAVs {a + 1} and {b + 1} are {sep[k]:.3f} m apart at t={int(times_ms[k])} ms "
                f"(minimum separation {config.min_separation_m} m)"
            )
    return TruthTrail(times_ms, positions, velocities)


def gps_errors(model: GpsNoiseModel, rng: np.random.Generator, size) -> np.ndarray:
    """Draw bounded GPS errors, shape ``size + (3,)`` (east, north, up)."""
    size = (size,) if np.isscalar(size) else tuple(size)
    h_bound, v_bound = model.bounds
    heading = rng.uniform(0.0, 2.0 * np.pi, size)
    if model.mode == "truncated-gaussian":
        radius = _truncated_rayleigh(rng, h_bound / 2.0, h_bound, size)
        vertical = _truncated_normal(rng, v_bound / 2.0, v_bound, size)
    else:
        radius = rng.uniform(0.0, 1.0, size) * h_bound
        vertical = rng.uniform(-1.0, 1.0, size) * v_bound
    return np.stack([radius * np.cos(heading), radius * np.sin(heading), vertical], axis=-1)


def _truncated_normal(rng, sigma, bound, size):
    if bound == 0:
        return np.zeros(size)
    out = rng.normal(0.0, sigma, size)
    bad = np.abs(out) > bound
    while bad.any():
        out[bad] = rng.normal(0.0, sigma, int(bad.sum()))
        bad = np.abs(out) > bound
    return out


def _truncated_rayleigh(rng, sigma, bound, size):
    # radius of an isotropic 2-D gaussian, re-drawn beyond the bound
    if bound == 0:
        return np.zeros(size)
    out = rng.rayleigh(sigma, size)
    bad = out > bound
    while bad.any():
        out[bad] = rng.rayleigh(sigma, int(bad.sum()))
        bad = out > bound
    return out


def sample_gps(truth: UavTruthState, model: GpsNoiseModel, rng: np.random.Generator, frame: LocalFrame) -> PositionReport:
    de, dn, du = gps_errors(model, rng, 1)[0]
    e, n, u = truth.position
    return PositionReport(truth.uav, truth.time_ms, local_to_geodetic(frame, e + de, n + dn, u + du))


def _uwb_distance_mm(true_m, model: UwbNoiseModel, rng, size=None):
    err = rng.uniform(-1.0, 1.0, size) * model.error_bound_m
    mm = np.rint((true_m + err) * 1000.0)
    # mm rounding must not push the reading outside the error bound
    lo = np.maximum(np.ceil((true_m - model.error_bound_m) * 1000.0), 0.0)
    hi = np.floor((true_m + model.error_bound_m) * 1000.0)
    return np.clip(mm, lo, np.maximum(hi, lo)).astype(np.int64)


def sample_uwb(
    truth_a: UavTruthState, truth_b: UavTruthState, model: UwbNoiseModel, rng: np.random.Generator
) -> RangingReport:
    if truth_a.time_ms != truth_b.time_ms:
        raise ValueError("ranging needs simultaneous truth states")
    true_m = float(np.linalg.norm(np.subtract(truth_a.position, truth_b.position)))
    if true_m > model.max_range_m:
        raise OutOfRangeError(
            f"UAVs {truth_a.uav} and {truth_b.uav} are {true_m:.2f} m apart, beyond {model.max_range_m} m"
        )
    a, b = sorted((truth_a.uav, truth_b.uav))
    return RangingReport(a, b, truth_a.time_ms, int(_uwb_distance_mm(true_m, model, rng)))


@dataclass
class SimulationResult:
    config: ScenarioConfig
    truth: TruthTrail
    position_reports: list[PositionReport]
    ranging_reports: list[RangingReport]
    out_of_range: int = 0
    #: ground truth of an injected attack (``attack.AttackLog``), if any
    attack_log: object = None

    def messages(self) -> list:
        """Reports in transmission order: each epoch's fixes, then its rangings."""
        return interleave(self.position_reports, self.ranging_reports)


def interleave(position_reports, ranging_reports) -> list:
    tagged = [(m.time_ms, 0, i, m) for i, m in enumerate(position_reports)]
    tagged += [(m.time_ms, 1, i, m) for i, m in enumerate(ranging_reports)]
    tagged.sort(key=lambda x: x[:3])
    return [m for *_, m in tagged]


def rng_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent generators for GPS noise, UWB noise and attack jitter."""
    gps, uwb, attack = np.random.SeedSequence(int(seed)).spawn(3)
    return {
        "gps": np.random.default_rng(gps),
        "uwb": np.random.default_rng(uwb),
        "attack": np.random.default_rng(attack),
    }


def generate_gps_reports(config: ScenarioConfig, truth: TruthTrail, rng: np.random.Generator) -> list[PositionReport]:
    errors = gps_errors(config.gps_noise, rng, truth.positions.shape[:2])
    noisy = truth.positions + errors
    lat, lon, alt = local_to_geodetic_array(config.frame, noisy[..., 0], noisy[..., 1], noisy[..., 2])
    alt = alt.astype(np.float32).astype(float)
    reports = []
    for k, t in enumerate(truth.times_ms.tolist()):
        for i in range(config.n_uavs):
            coord = GeoCoordinate(float(lat[k, i]), float(lon[k, i]), float(alt[k, i]))
            reports.append(PositionReport(i + 1, t, coord))
    return reports


def generate_uwb_reports(
    config: ScenarioConfig, truth: TruthTrail, rng: np.random.Generator
) -> tuple[list[RangingReport], int]:
    pairs = config.pairs()
    model = config.uwb_noise
    per_pair = []
    skipped = 0
    for a, b in pairs:
        true_m = np.linalg.norm(truth.positions[:, a - 1] - truth.positions[:, b - 1], axis=1)
        mm = _uwb_distance_mm(true_m, model, rng, true_m.shape)
        in_range = true_m <= model.max_range_m
        skipped += int((~in_range).sum())
        per_pair.append((a, b, mm, in_range))
    reports = []
    for k, t in enumerate(truth.times_ms.tolist()):
        for a, b, mm, in_range in per_pair:
            if in_range[k]:
                reports.append(RangingReport(a, b, t, int(mm[k])))
    return reports, skipped


def simulate(config: ScenarioConfig) -> SimulationResult:
    """Run the benign swarm: truth, noisy GPS fixes and UWB ranging."""
    truth = simulate_truth(config)
    streams = rng_streams(config.seed)
    positions = generate_gps_reports(config, truth, streams["gps"])
    ranging, skipped = generate_uwb_reports(config, truth, streams["uwb"])
    return SimulationResult(config, truth, positions, ranging, skipped)
