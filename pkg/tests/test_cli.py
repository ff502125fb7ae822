import json

import pytest

from swarmguard.cli import main
from swarmguard.config import save_experiment
from swarmguard.energy import EnergyReport
from swarmguard.gcs.codec import ingest
from swarmguard.gcs.loop import read_verdict_log
from swarmguard.presets import hover_formation, preset_experiment, single_victim_offset_attack
from swarmguard.detection import ThresholdConfig


def short_spec(path, attack=True, seed=0, duration_s=60.0):
    spec = preset_experiment("constant-offset", seed=seed)
    spec.scenario = hover_formation(seed, duration_s=duration_s)
    spec.attack = single_victim_offset_attack(window=(20_000, 40_000)) if attack else None
    save_experiment(spec, path)
    return path


def test_simulate_writes_replay_and_truth(tmp_path, capsys):
    cfg = short_spec(tmp_path / "e.json")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ranging_per_pair"] == {"1-2": 120, "1-3": 120}
    messages = ingest((tmp_path / "o" / "replay.bin").read_bytes())
    assert len(messages) == report["messages"] == 120 * 5
    truth = (tmp_path / "o" / "truth.csv").read_text().splitlines()
    assert len(truth) == 1 + 120 * 3


def test_default_simulation_has_3000_rangings_per_pair(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path), "--format", "json"]) == 0
    assert set(json.loads(capsys.readouterr().out)["ranging_per_pair"].values()) == {3000}


def test_detect_exit_codes_and_outputs(tmp_path, capsys):
    attacked = short_spec(tmp_path / "a.json")
    main(["simulate", "--config", str(attacked), "--out", str(tmp_path / "a")])
    code = main(["detect", str(tmp_path / "a" / "replay.bin"), "--config", str(attacked), "--out", str(tmp_path / "a")])
    assert code == 2
    header, records = read_verdict_log(tmp_path / "a" / "verdicts.jsonl")
    assert header["fail_safe"] and len(records) == 120
    window = [r for r in records if 20_000 <= r["time_ms"] <= 40_000]
    assert window and all(r["attack_detected"] for r in window)
    assert (tmp_path / "a" / "verdicts.csv").read_text().startswith("time_ms,pair,spoofed")

    clean = short_spec(tmp_path / "c.json", attack=False, seed=7)
    main(["simulate", "--config", str(clean), "--out", str(tmp_path / "c")])
    capsys.readouterr()
    code = main(
        ["detect", str(tmp_path / "c" / "replay.bin"), "--config", str(clean), "--out", str(tmp_path / "c"), "--format", "json"]
    )
    summary = json.loads(capsys.readouterr().out)
    assert code == 0 and summary["flagged_epochs"] == 0 and summary["fail_safe"] is False


def test_nominal_threshold_flags_superset(tmp_path):
    cfg = short_spec(tmp_path / "e.json", duration_s=120)
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    flags = {}
    for preset in ("nominal", "safe"):
        out = tmp_path / preset
        main(["detect", str(tmp_path / "replay.bin"), "--threshold-preset", preset, "--n-uavs", "3", "--out", str(out)])
        _, records = read_verdict_log(out / "verdicts.jsonl")
        flags[preset] = {r["time_ms"] for r in records if r["attack_detected"]}
    assert flags["safe"] <= flags["nominal"]


def test_detect_missing_file(tmp_path, capsys):
    assert main(["detect", str(tmp_path / "nope.bin"), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_invalid_config_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_uavs": 1}')
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_montecarlo_degenerate_benign(tmp_path, capsys):
    cfg = short_spec(tmp_path / "e.json", attack=False)
    assert main(["montecarlo", "--config", str(cfg), "--trials", "1", "--out", str(tmp_path), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["trials"] == 1 and report["detection_rate"] is None
    assert report["false_positive_rate"] == 0.0
    assert json.loads((tmp_path / "rates.json").read_text()) == report
    assert (tmp_path / "trials.csv").read_text().splitlines()[1].startswith("0,0,120,0")


def test_montecarlo_workers_do_not_change_results(tmp_path):
    cfg = short_spec(tmp_path / "e.json")
    main(["montecarlo", "--config", str(cfg), "--trials", "3", "--out", str(tmp_path / "one")])
    main(["montecarlo", "--config", str(cfg), "--trials", "3", "--workers", "3", "--out", str(tmp_path / "three")])
    assert (tmp_path / "one" / "rates.json").read_bytes() == (tmp_path / "three" / "rates.json").read_bytes()
    assert json.loads((tmp_path / "one" / "rates.json").read_text())["detection_rate"] == 1.0


def test_energy_text_and_json(tmp_path, capsys):
    assert main(["energy"]) == 0
    text = capsys.readouterr().out
    for needle in ("7.1000 mW", "165.0000 mW", "30.0000 s", "1.3750 mWh", "note:"):
        assert needle in text
    main(["energy", "--format", "json", "--messages", "1500"])
    data = json.loads(capsys.readouterr().out)
    assert EnergyReport.from_dict(data["telemetry"]).transmit_seconds == 15.0
    cfg = tmp_path / "energy.json"
    cfg.write_text(json.dumps({"ranging_rate_hz": 4.0}))
    main(["energy", "--config", str(cfg), "--format", "json"])
    assert json.loads(capsys.readouterr().out)["ranging"]["power_mw"] == pytest.approx(14.2)


def test_preset_and_config_are_exclusive(tmp_path):
    cfg = short_spec(tmp_path / "e.json")
    assert main(["simulate", "--config", str(cfg), "--preset", "benign", "--out", str(tmp_path)]) == 1
