"""Command-line entry point: ``swarmguard {simulate,detect,montecarlo,energy}``.

Exit status is 0 when a command ran and saw no spoofing, 2 when spoofing
was flagged (``detect``/``montecarlo``), 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from swarmguard.config import ExperimentSpec, load_experiment, save_experiment
from swarmguard.detection import THRESHOLD_PRESETS, ThresholdConfig
from swarmguard.energy import REFERENCE_REDUCTION_S, EnergyConfig, energy_summary
from swarmguard.experiment import montecarlo, run_scenario
from swarmguard.gcs.codec import Ingestor, encode_stream
from swarmguard.gcs.loop import run_detection_loop, verdict_csv
from swarmguard.gcs.schedule import TOPOLOGIES
from swarmguard.presets import PRESETS, preset_experiment

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_SPOOFED = 2


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _experiment(args) -> ExperimentSpec:
    if args.config and getattr(args, "preset", None):
        raise ValueError("use either --config or --preset, not both")
    if args.config:
        spec = load_experiment(args.config)
    else:
        spec = preset_experiment(getattr(args, "preset", None) or "benign")
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    if getattr(args, "trials", None) is not None:
        spec.trials = args.trials
    return spec


def cmd_simulate(args) -> int:
    spec = _experiment(args)
    result = run_scenario(spec.scenario, spec.attack)
    out = _out_dir(args)
    messages = result.messages()
    (out / "replay.bin").write_bytes(encode_stream(messages))
    (out / "truth.csv").write_text(result.truth.to_csv(), encoding="utf-8")
    save_experiment(spec, out / "experiment.json")
    pairs = spec.scenario.pairs()
    per_pair = {f"{a}-{b}": 0 for a, b in pairs}
    for r in result.ranging_reports:
        per_pair[f"{r.uav_a}-{r.uav_b}"] += 1
    payload = {
        "replay": str(out / "replay.bin"),
        "truth": str(out / "truth.csv"),
        "messages": len(messages),
        "position_reports": len(result.position_reports),
        "ranging_reports": len(result.ranging_reports),
        "ranging_per_pair": per_pair,
        "out_of_range": result.out_of_range,
        "attack": spec.attack is not None,
    }
    text = "\n".join(
        [
            f"wrote {payload['messages']} frames to {payload['replay']}",
            f"  position reports: {payload['position_reports']}",
            f"  ranging reports:  {payload['ranging_reports']} ({', '.join(f'{k}: {v}' for k, v in per_pair.items())})",
            f"  truth trail:      {payload['truth']}",
        ]
    )
    _emit(args, payload, text)
    return EXIT_CLEAN


def _detect_settings(args):
    thresholds, topology, n_uavs = ThresholdConfig(), "anchor", None
    if args.config:
        spec = load_experiment(args.config)
        thresholds, topology, n_uavs = spec.thresholds, spec.scenario.topology, spec.scenario.n_uavs
    if args.threshold_preset:
        thresholds = ThresholdConfig.preset(
            args.threshold_preset,
            zero_tolerance_m=thresholds.zero_tolerance_m,
            time_threshold_ms=thresholds.time_threshold_ms,
            collision_tolerance_m=thresholds.collision_tolerance_m,
        )
    if args.topology:
        topology = args.topology
    if args.n_uavs:
        n_uavs = args.n_uavs
    return thresholds, topology, n_uavs


def cmd_detect(args) -> int:
    thresholds, topology, n_uavs = _detect_settings(args)
    data = Path(args.replay).read_bytes()
    ingestor = Ingestor()
    messages = list(ingestor.iter_messages(data))
    result = run_detection_loop(messages, thresholds, topology, n_uavs)
    result.log.config["ingest_errors"] = dict(sorted(ingestor.errors.items()))
    out = _out_dir(args)
    result.log.save(out / "verdicts.jsonl")
    (out / "verdicts.csv").write_text(verdict_csv(result.verdicts), encoding="utf-8")
    summary = result.summary()
    summary.update(
        {
            "messages": len(messages),
            "ingest_errors": dict(sorted(ingestor.errors.items())),
            "dist_threshold_m": thresholds.dist_threshold_m,
            "threshold_preset": thresholds.preset_name,
            "log": str(out / "verdicts.jsonl"),
        }
    )
    criteria = ", ".join(f"{k}: {v}" for k, v in summary["criteria"].items()) or "none"
    text = "\n".join(
        [
            f"epochs evaluated: {summary['epochs']}",
            f"flagged epochs:   {summary['flagged_epochs']}",
            f"pair criteria:    {criteria}",
            f"threshold:        {thresholds.dist_threshold_m} m ({thresholds.preset_name or 'custom'})",
            f"fail_safe:        {str(summary['fail_safe']).lower()}",
            f"ingest errors:    {sum(ingestor.errors.values())}",
            f"log:              {summary['log']}",
        ]
    )
    _emit(args, summary, text)
    return EXIT_SPOOFED if result.fail_safe else EXIT_CLEAN


def cmd_montecarlo(args) -> int:
    spec = _experiment(args)
    report = montecarlo(spec, benign=not args.skip_benign, workers=args.workers)
    out = _out_dir(args)
    (out / "rates.json").write_text(report.to_json(), encoding="utf-8")
    (out / "trials.csv").write_text(report.to_csv(), encoding="utf-8")

    def fmt(x):
        return "n/a" if x is None else f"{x:.6f}"

    text = "\n".join(
        [
            f"trials:               {report.trials}",
            f"threshold:            {spec.thresholds.dist_threshold_m} m ({spec.thresholds.preset_name or 'custom'})",
            f"detection rate:       {fmt(report.detection_rate)}",
            f"epoch detection rate: {fmt(report.epoch_detection_rate)}",
            f"false positive rate:  {fmt(report.false_positive_rate)}",
            f"mean latency:         {fmt(report.mean_latency_ms)} ms",
        ]
    )
    _emit(args, report.to_dict(), text)
    flagged = bool(report.detection_rate) or bool(report.false_positive_rate)
    return EXIT_SPOOFED if flagged else EXIT_CLEAN


def cmd_energy(args) -> int:
    cfg = EnergyConfig()
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = EnergyConfig(**json.load(fh))
    summary = energy_summary(cfg, args.messages)
    r, t, c = summary["ranging"], summary["telemetry"], summary["combined"]
    rows = [
        ("ranging power", r["power_mw"], "mW"),
        ("ranging energy", r["energy_mwh"], "mWh"),
        ("ranging flight-time reduction", r["flight_time_reduction_s"], "s"),
        ("telemetry power", t["power_mw"], "mW"),
        ("telemetry transmit time", t["transmit_seconds"], "s"),
        ("telemetry energy", t["energy_mwh"], "mWh"),
        ("telemetry flight-time reduction", t["flight_time_reduction_s"], "s"),
        ("combined energy", c["energy_mwh"], "mWh"),
        ("combined flight-time reduction", c["flight_time_reduction_s"], "s"),
    ]
    width = max(len(name) for name, *_ in rows)
    lines = [f"battery: {summary['battery_mwh']:g} mWh, messages: {summary['message_count']}"]
    lines += [f"{name:<{width}}  {value:>10.4f} {unit}" for name, value, unit in rows]
    lines.append(
        "note: reference reductions of "
        f"{REFERENCE_REDUCTION_S['ranging']} s (ranging) and {REFERENCE_REDUCTION_S['telemetry']} s (telemetry) "
        "are about twice what the constant-power formula gives"
    )
    _emit(args, summary, "\n".join(lines))
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmguard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--config", help="experiment JSON document")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--out", default=out_default, help="output directory")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("simulate", help="simulate a swarm (and attack) into a replay file")
    common(p, "out")
    p.add_argument("--preset", choices=PRESETS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="run detection over a replay file")
    p.add_argument("replay", help="framed telemetry stream written by 'simulate'")
    common(p, "out")
    p.add_argument("--threshold-preset", choices=sorted(THRESHOLD_PRESETS))
    p.add_argument("--topology", choices=TOPOLOGIES)
    p.add_argument("--n-uavs", type=int)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("montecarlo", help="estimate detection and false-positive rates")
    common(p, "out")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--skip-benign", action="store_true", help="only run attacked trials")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("energy", help="print the ranging/telemetry energy budget")
    common(p, "out")
    p.add_argument("--messages", type=int, help="telemetry message count (default: one per ranging)")
    p.set_defaults(func=cmd_energy)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"swarmguard {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
