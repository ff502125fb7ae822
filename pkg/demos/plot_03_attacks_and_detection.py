"""
Three spoofing cases and how the detector sees them
===================================================

Each case injects a different attack into the same hovering swarm. UAV 1
sits at the origin, UAV 2 is 20 m east and UAV 3 is 20 m north.
"""

from collections import Counter

from swarmguard.detection import ThresholdConfig, detect
from swarmguard.experiment import run_scenario
from swarmguard.presets import divergent_attack, hover_formation, identical_signal_attack, single_victim_offset_attack

safe = ThresholdConfig.preset("safe")
window = (10_000, 20_000)


def show(title, cfg, attack):
    result = run_scenario(cfg, attack)
    run = detect(result.messages(), safe, cfg.n_uavs, cfg.topology)
    inside = [v for v in run.verdicts if attack.is_active(v.time_ms)]
    v = inside[0]
    print(f"\n{title}")
    print(f"  flagged {sum(x.attack_detected for x in inside)}/{len(inside)} epochs in the window")
    for p in v.verdicts:
        print(f"  {p.pair}: d_gps={p.d_gps_m:8.2f}  d_uwb={p.d_uwb_m:6.2f}  -> {p.criterion}")
    print(f"  suspects {sorted(v.suspected_uavs)}, hint {v.scenario_hint}")
    print("  criteria:", dict(Counter(p.criterion for x in inside for p in x.flagged_pairs)))


# Single victim: UAV 2 alone is pushed 50 m north. Its distances to the others no
# longer agree with UWB.
show("single victim, 50 m offset", hover_formation(0, duration_s=30), single_victim_offset_attack(50.0, window))

# Shared signal: one transmitter captures UAVs 2 and 3. With no jitter they compute
# the same fix, so their GPS distance collapses to zero while UWB still
# reads 28 m. The pair (2, 3) is only ranged in the all-pairs topology.
show(
    "one transmitter, two victims",
    hover_formation(0, duration_s=30, topology="all-pairs"),
    identical_signal_attack(window, jitter_m=0.0),
)

# Divergent signals: two transmitters drag their victims 500 m apart. In the anchor
# topology every spoke is flagged, and a star cannot tell "UAV 1 spoofed"
# from "UAVs 2 and 3 spoofed", so all three are suspected.
show("two transmitters, divergent fixes", hover_formation(0, duration_s=30), divergent_attack(500.0, window))
