"""JSON experiment documents.

One document describes a scenario (the :class:`~swarmguard.sim.ScenarioConfig`
fields at top level), an optional ``attack``, optional ``thresholds`` and an
optional trial count::

    {
      "seed": 7, "n_uavs": 3,
      "origin": {"latitude_deg": 52.0, "longitude_deg": 14.0, "altitude_m": 0.0},
      "waypoints": [[{"east_m": 0, "north_m": 0, "up_m": 50}], ...],
      "gps_noise": {"mode": "bounded-uniform"},
      "attack": {"transmitters": [...], "active_window": [300000, 600000]},
      "thresholds": {"preset": "safe"},
      "trials": 100
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

from swarmguard.attack import AttackScenario, attack_from_dict
from swarmguard.detection import ThresholdConfig
from swarmguard.geodesy import GeoCoordinate
from swarmguard.sim import GpsNoiseModel, ScenarioConfig, ScenarioError, UwbNoiseModel, Waypoint

_SCENARIO_KEYS = {
    "seed",
    "n_uavs",
    "origin",
    "waypoints",
    "duration_s",
    "ranging_rate_hz",
    "min_separation_m",
    "gps_noise",
    "uwb_noise",
    "topology",
}
_EXPERIMENT_KEYS = {"attack", "thresholds", "trials"}


@dataclass
class ExperimentSpec:
    scenario: ScenarioConfig
    attack: AttackScenario | None = None
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    trials: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ScenarioError("trials must be >= 1")

    @property
    def base_seed(self) -> int:
        return int(self.scenario.seed)

    def trial_seed(self, trial: int) -> int:
        return (self.base_seed + trial) % 2**64

    def trial_scenario(self, trial: int) -> ScenarioConfig:
        return replace(self.scenario, seed=self.trial_seed(trial))

    def with_seed(self, seed: int) -> "ExperimentSpec":
        return replace(self, scenario=replace(self.scenario, seed=seed))

    def to_dict(self) -> dict:
        out = self.scenario.to_dict()
        out["attack"] = self.attack.to_dict() if self.attack else None
        out["thresholds"] = self.thresholds.to_dict()
        out["trials"] = self.trials
        return out


def _waypoint(data) -> Waypoint:
    if isinstance(data, dict):
        return Waypoint(
            float(data["east_m"]), float(data["north_m"]), float(data["up_m"]), float(data.get("speed_mps", 0.0))
        )
    values = [float(x) for x in data]
    if len(values) not in (3, 4):
        raise ScenarioError(f"waypoint needs [east, north, up] or [east, north, up, speed], got {data!r}")
    return Waypoint(*values)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig(
            seed=int(data.get("seed", 0)),
            n_uavs=int(data["n_uavs"]),
            origin=GeoCoordinate.from_dict(data["origin"]),
            waypoints=[[_waypoint(wp) for wp in plan] for plan in data["waypoints"]],
            duration_s=float(data.get("duration_s", 1500.0)),
            ranging_rate_hz=float(data.get("ranging_rate_hz", 2.0)),
            min_separation_m=float(data.get("min_separation_m", 2.0)),
            gps_noise=GpsNoiseModel(**data.get("gps_noise", {})),
            uwb_noise=UwbNoiseModel(**data.get("uwb_noise", {})),
            topology=data.get("topology", "anchor"),
        )
    except KeyError as exc:
        raise ScenarioError(f"scenario is missing field {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ScenarioError(str(exc)) from None


def experiment_from_dict(data: dict) -> ExperimentSpec:
    unknown = set(data) - _SCENARIO_KEYS - _EXPERIMENT_KEYS
    if unknown:
        raise ScenarioError(f"unknown config fields: {sorted(unknown)}")
    scenario = scenario_from_dict(data)
    try:
        attack = attack_from_dict(data["attack"], scenario.frame) if data.get("attack") else None
        thresholds = ThresholdConfig.from_dict(data.get("thresholds", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid attack/thresholds section: {exc}") from None
    return ExperimentSpec(scenario, attack, thresholds, int(data.get("trials", 1)))


def load_experiment(path: str | os.PathLike) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return experiment_from_dict(json.load(fh))


def save_experiment(spec: ExperimentSpec, path: str | os.PathLike):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")
