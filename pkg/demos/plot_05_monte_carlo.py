"""
Detection and false-positive rates
==================================

Monte Carlo trials give a detection rate per attack and a false-positive
rate for the benign swarm. This demo also shows why the threshold must
match the noise model.
"""

from swarmguard.config import ExperimentSpec
from swarmguard.detection import ThresholdConfig, benign_discrepancy_bound
from swarmguard.experiment import montecarlo
from swarmguard.presets import hover_formation, patrol_formation, single_victim_offset_attack
from swarmguard.sim import GpsNoiseModel

safe = ThresholdConfig.preset("safe")

# With 4.9 m horizontal error and no vertical error, two fixes and a
# 0.3 m UWB error can disagree by at most 2 * 4.9 + 0.3 = 10.1 m.
horizontal_only = GpsNoiseModel(horizontal_bound_m=4.9, vertical_bound_m=0.0)
spec = ExperimentSpec(patrol_formation(0, gps_noise=horizontal_only), None, safe, trials=5)
print("horizontal-only noise, FP rate:", montecarlo(spec).false_positive_rate)

# Adding 4.9 m of vertical error raises the per-fix bound to 6.93 m, and
# the benign worst case to 14.16 m. At 10.1 m, rare benign epochs flag.
full = GpsNoiseModel()
print(f"needed threshold with vertical noise: {benign_discrepancy_bound(full.fix_error_bound_m, 0.3):.2f} m")
spec = ExperimentSpec(patrol_formation(0), None, safe, trials=5)
print("3-D noise at 10.1 m, FP rate:", montecarlo(spec).false_positive_rate)

# Offsets well above the threshold are always caught; offsets below it
# are invisible. That is the mechanism's blind spot.
for offset in (50.0, 15.0, 3.0):
    spec = ExperimentSpec(hover_formation(0), single_victim_offset_attack(offset), safe, trials=5)
    report = montecarlo(spec, benign=False)
    print(f"{offset:4.0f} m offset: detection rate {report.detection_rate:.2f}, epoch rate {report.epoch_detection_rate:.3f}")
