"""Single- and multi-transmitter GPS spoofing injected into simulated telemetry.

Only position reports are touched; UWB ranging is the trusted channel and
passes through unchanged by construction (it is never an input here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from swarmguard.geodesy import GeoCoordinate, LocalFrame, geodetic_to_local, local_to_geodetic
from swarmguard.gcs.messages import PositionReport
from swarmguard.sim import TruthTrail, UavTruthState


class SpoofStream(Protocol):
    """Coordinate a victim computes from a transmitter's signal at an epoch."""

    preset: str

    def __call__(self, epoch: int, victim: int, truth: TruthTrail, frame: LocalFrame) -> GeoCoordinate: ...

    def to_dict(self) -> dict: ...


@dataclass(frozen=True)
class FixedPoint:
    """Every victim computes the same static coordinate (hover/land target)."""

    coordinate: GeoCoordinate
    preset: str = field(default="fixed-point", init=False)

    def __call__(self, epoch, victim, truth, frame):
        return self.coordinate

    def to_dict(self):
        return {"preset": self.preset, **self.coordinate.to_dict()}


@dataclass(frozen=True)
class ConstantOffset:
    """Victim's own truth displaced by a fixed vector; preserves the trajectory shape."""

    east_m: float
    north_m: float
    up_m: float = 0.0
    preset: str = field(default="constant-offset", init=False)

    def __call__(self, epoch, victim, truth, frame):
        e, n, u = truth.positions[epoch, victim - 1]
        return local_to_geodetic(frame, e + self.east_m, n + self.north_m, u + self.up_m)

    def to_dict(self):
        return {"preset": self.preset, "east_m": self.east_m, "north_m": self.north_m, "up_m": self.up_m}


@dataclass(frozen=True)
class Replay:
    """Victim's truth from ``delay_epochs`` epochs earlier (clamped at the start)."""

    delay_epochs: int
    preset: str = field(default="replay", init=False)

    def __post_init__(self):
        if self.delay_epochs < 0:
            raise ValueError("delay_epochs must be >= 0")

    def __call__(self, epoch, victim, truth, frame):
        e, n, u = truth.positions[max(epoch - self.delay_epochs, 0), victim - 1]
        return local_to_geodetic(frame, e, n, u)

    def to_dict(self):
        return {"preset": self.preset, "delay_epochs": self.delay_epochs}


SPOOF_PRESETS = ("fixed-point", "constant-offset", "replay")


def spoof_stream_from_dict(data: dict, frame: LocalFrame | None = None) -> SpoofStream:
    """Build a preset by name. ``fixed-point`` accepts either a geodetic
    coordinate or ``east_m``/``north_m``/``up_m`` relative to ``frame``."""
    preset = data.get("preset")
    if preset == "fixed-point":
        if "latitude_deg" in data:
            return FixedPoint(GeoCoordinate.from_dict(data))
        if frame is None:
            raise ValueError("fixed-point with local offsets needs a frame")
        return FixedPoint(
            local_to_geodetic(frame, float(data["east_m"]), float(data["north_m"]), float(data.get("up_m", 0.0)))
        )
    if preset == "constant-offset":
        return ConstantOffset(*(float(data.get(k, 0.0)) for k in ("east_m", "north_m", "up_m")))
    if preset == "replay":
        return Replay(int(data["delay_epochs"]))
    raise ValueError(f"unknown spoof preset {preset!r}; expected one of {SPOOF_PRESETS}")


@dataclass(frozen=True)
class Transmitter:
    position: tuple[float, float, float]
    coverage_radius_m: float
    spoof_stream: SpoofStream
    delay_jitter_m: float = 0.5

    def __post_init__(self):
        if not self.coverage_radius_m > 0:
            raise ValueError("coverage_radius_m must be > 0")
        if not self.delay_jitter_m >= 0:
            raise ValueError("delay_jitter_m must be >= 0")

    def to_dict(self):
        return {
            "position": list(self.position),
            "coverage_radius_m": self.coverage_radius_m,
            "delay_jitter_m": self.delay_jitter_m,
            "spoof_stream": self.spoof_stream.to_dict(),
        }


@dataclass(frozen=True)
class AttackScenario:
    """Transmitters plus the closed time window ``[start, end]`` (ms) they are on.

    With ``jamming_precedes`` the first ``blackout_ms`` of the window is pure
    jamming: victims drop their fixes instead of reporting spoofed ones.
    """

    transmitters: tuple[Transmitter, ...]
    active_window: tuple[int, int]
    jamming_precedes: bool = False
    blackout_ms: int = 0

    def __post_init__(self):
        object.__setattr__(self, "transmitters", tuple(self.transmitters))
        object.__setattr__(self, "active_window", tuple(int(t) for t in self.active_window))
        if not self.transmitters:
            raise ValueError("an attack needs at least one transmitter")
        start, end = self.active_window
        if not 0 <= start < end:
            raise ValueError(f"active_window must satisfy 0 <= start < end, got {self.active_window}")
        if self.blackout_ms < 0:
            raise ValueError("blackout_ms must be >= 0")

    @property
    def multi_transmitter(self) -> bool:
        return len(self.transmitters) > 1

    def is_active(self, time_ms: int) -> bool:
        start, end = self.active_window
        return start <= time_ms <= end

    def is_jammed(self, time_ms: int) -> bool:
        start, _ = self.active_window
        return self.jamming_precedes and self.is_active(time_ms) and time_ms < start + self.blackout_ms

    def to_dict(self):
        return {
            "transmitters": [t.to_dict() for t in self.transmitters],
            "active_window": list(self.active_window),
            "jamming_precedes": self.jamming_precedes,
            "blackout_ms": self.blackout_ms,
        }


def _nearest_transmitter(scenario: AttackScenario, position) -> int | None:
    best, best_d = None, math.inf
    for idx, tx in enumerate(scenario.transmitters):
        d = math.dist(position, tx.position)
        if d <= tx.coverage_radius_m and d < best_d:
            best, best_d = idx, d
    return best


def affected_set(scenario: AttackScenario, truth: Sequence[UavTruthState]) -> dict[int, Transmitter]:
    """Victims at one instant, each mapped to the transmitter it locks onto.

    The nearest transmitter in whose coverage a UAV sits wins; outside the
    active window nobody is affected.
    """
    if not truth or not scenario.is_active(truth[0].time_ms):
        return {}
    out = {}
    for state in truth:
        idx = _nearest_transmitter(scenario, state.position)
        if idx is not None:
            out[state.uav] = scenario.transmitters[idx]
    return out


def _jittered(coord: GeoCoordinate, jitter_m: float, rng: np.random.Generator) -> GeoCoordinate:
    if jitter_m == 0:
        return coord
    heading = rng.uniform(0.0, 2.0 * math.pi)
    radius = rng.uniform(0.0, 1.0) * jitter_m
    return local_to_geodetic(LocalFrame(coord), radius * math.cos(heading), radius * math.sin(heading), 0.0)


@dataclass
class AttackLog:
    """Ground truth of what the attack did, keyed by epoch time."""

    victims: dict[int, dict[int, int]] = field(default_factory=dict)
    dropped: int = 0

    def affected_at(self, time_ms: int) -> dict[int, int]:
        return self.victims.get(time_ms, {})


def apply_attack(
    scenario: AttackScenario,
    truth: TruthTrail,
    clean_reports: Sequence[PositionReport],
    rng: np.random.Generator,
    frame: LocalFrame,
    log: AttackLog | None = None,
) -> list[PositionReport]:
    """Replace victims' fixes with spoofed ones; everything else passes through."""
    epoch_of = {int(t): k for k, t in enumerate(truth.times_ms)}
    victims_cache: dict[int, dict[int, int]] = {}
    out = []
    for report in clean_reports:
        t = report.time_ms
        if not scenario.is_active(t) or t not in epoch_of:
            out.append(report)
            continue
        k = epoch_of[t]
        if k not in victims_cache:
            victims = {}
            for i, pos in enumerate(truth.positions[k]):
                idx = _nearest_transmitter(scenario, pos)
                if idx is not None:
                    victims[i + 1] = idx
            victims_cache[k] = victims
            if log is not None and victims:
                log.victims[t] = dict(victims)
        idx = victims_cache[k].get(report.uav)
        if idx is None:
            out.append(report)
            continue
        if scenario.is_jammed(t):
            if log is not None:
                log.dropped += 1
            continue
        tx = scenario.transmitters[idx]
        coord = _jittered(tx.spoof_stream(k, report.uav, truth, frame), tx.delay_jitter_m, rng)
        out.append(PositionReport(report.uav, t, coord))
    return out


def attack_from_dict(data: dict, frame: LocalFrame) -> AttackScenario:
    transmitters = []
    for tx in data["transmitters"]:
        transmitters.append(
            Transmitter(
                position=tuple(float(x) for x in tx["position"]),
                coverage_radius_m=float(tx["coverage_radius_m"]),
                spoof_stream=spoof_stream_from_dict(tx["spoof_stream"], frame),
                delay_jitter_m=float(tx.get("delay_jitter_m", 0.5)),
            )
        )
    return AttackScenario(
        transmitters=tuple(transmitters),
        active_window=tuple(data["active_window"]),
        jamming_precedes=bool(data.get("jamming_precedes", False)),
        blackout_ms=int(data.get("blackout_ms", 0)),
    )


def spoofed_offset_m(frame: LocalFrame, coord: GeoCoordinate, truth_position) -> float:
    """Horizontal distance between a reported fix and the truth position."""
    e, n, _ = geodetic_to_local(frame, coord)
    return math.hypot(e - truth_position[0], n - truth_position[1])
