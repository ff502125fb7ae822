"""Scenario runs and Monte Carlo rate estimation."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import mean

from swarmguard.attack import AttackLog, AttackScenario, apply_attack
from swarmguard.config import ExperimentSpec
from swarmguard.detection import DetectionRun, detect
from swarmguard.sim import ScenarioConfig, SimulationResult, rng_streams, simulate


def run_scenario(config: ScenarioConfig, attack: AttackScenario | None = None) -> SimulationResult:
    """Simulate the swarm and, if given, inject the attack into its GPS fixes."""
    result = simulate(config)
    if attack is not None:
        log = AttackLog()
        result.position_reports = apply_attack(
            attack, result.truth, result.position_reports, rng_streams(config.seed)["attack"], config.frame, log
        )
        result.attack_log = log
    return result


def detect_scenario(result: SimulationResult, spec: ExperimentSpec) -> DetectionRun:
    cfg = result.config
    return detect(result.messages(), spec.thresholds, cfg.n_uavs, cfg.topology)


@dataclass
class TrialOutcome:
    trial: int
    seed: int
    benign_epochs: int = 0
    benign_flagged: int = 0
    window_epochs: int = 0
    window_flagged: int = 0
    detected: bool | None = None
    latency_ms: int | None = None
    hints: dict[str, int] = field(default_factory=dict)


def run_trial(spec: ExperimentSpec, trial: int, benign: bool = True) -> TrialOutcome:
    config = spec.trial_scenario(trial)
    out = TrialOutcome(trial, config.seed)
    if benign:
        run = detect_scenario(run_scenario(config), spec)
        out.benign_epochs = len(run.verdicts)
        out.benign_flagged = len(run.flagged)
    if spec.attack is not None:
        run = detect_scenario(run_scenario(config, spec.attack), spec)
        start, _ = spec.attack.active_window
        in_window = [v for v in run.verdicts if spec.attack.is_active(v.time_ms)]
        flagged = [v for v in in_window if v.attack_detected]
        out.window_epochs = len(in_window)
        out.window_flagged = len(flagged)
        out.detected = bool(flagged)
        out.latency_ms = flagged[0].time_ms - start if flagged else None
        for v in flagged:
            out.hints[v.scenario_hint] = out.hints.get(v.scenario_hint, 0) + 1
    return out


@dataclass
class RateReport:
    trials: int
    thresholds: dict
    detection_rate: float | None
    false_positive_rate: float | None
    epoch_detection_rate: float | None
    latencies_ms: list[int]
    outcomes: list[TrialOutcome]

    @property
    def mean_latency_ms(self) -> float | None:
        return mean(self.latencies_ms) if self.latencies_ms else None

    @property
    def max_latency_ms(self) -> int | None:
        return max(self.latencies_ms) if self.latencies_ms else None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "thresholds": self.thresholds,
            "detection_rate": self.detection_rate,
            "false_positive_rate": self.false_positive_rate,
            "epoch_detection_rate": self.epoch_detection_rate,
            "mean_latency_ms": self.mean_latency_ms,
            "max_latency_ms": self.max_latency_ms,
            "latencies_ms": self.latencies_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        cols = [
            "trial",
            "seed",
            "benign_epochs",
            "benign_flagged",
            "window_epochs",
            "window_flagged",
            "detected",
            "latency_ms",
        ]
        lines = [",".join(cols)]
        for o in self.outcomes:
            row = asdict(o)
            lines.append(",".join("" if row[c] is None else str(row[c]).lower() for c in cols))
        return "\n".join(lines) + "\n"


def _run(args):
    spec, trial, benign = args
    return run_trial(spec, trial, benign)


def montecarlo(spec: ExperimentSpec, benign: bool = True, workers: int = 1) -> RateReport:
    """Run ``spec.trials`` seeded trials (seed = base + trial index).

    Each trial simulates the benign swarm (for the false-positive rate) and,
    when an attack is configured, the same seed under attack (for the
    detection rate). Results do not depend on ``workers``.
    """
    jobs = [(spec, i, benign) for i in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run, jobs))
    else:
        outcomes = [_run(job) for job in jobs]
    outcomes.sort(key=lambda o: o.trial)

    benign_epochs = sum(o.benign_epochs for o in outcomes)
    fp_rate = sum(o.benign_flagged for o in outcomes) / benign_epochs if benign and benign_epochs else None
    detection_rate = epoch_rate = None
    latencies: list[int] = []
    if spec.attack is not None:
        detection_rate = sum(bool(o.detected) for o in outcomes) / len(outcomes)
        window = sum(o.window_epochs for o in outcomes)
        epoch_rate = sum(o.window_flagged for o in outcomes) / window if window else None
        latencies = [o.latency_ms for o in outcomes if o.latency_ms is not None]
    return RateReport(
        trials=spec.trials,
        thresholds=spec.thresholds.to_dict(),
        detection_rate=detection_rate,
        false_positive_rate=fp_rate,
        epoch_detection_rate=epoch_rate,
        latencies_ms=latencies,
        outcomes=outcomes,
    )
