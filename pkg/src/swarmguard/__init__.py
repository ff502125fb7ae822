"""GPS-spoofing detection for UAV swarms by cross-checking GPS-derived
inter-UAV distances against UWB ranging."""

from swarmguard.detection import (
    DetectionVerdict,
    PairedSample,
    SwarmVerdict,
    ThresholdConfig,
    detect,
    evaluate_pair,
    evaluate_swarm,
    match_samples,
    pair_gps_distance,
)
from swarmguard.geodesy import (
    EarthModel,
    GeoCoordinate,
    LocalFrame,
    altitude_adjusted_distance,
    local_to_geodetic,
    spherical_distance,
)

__version__ = "0.1.0"

__all__ = [
    "DetectionVerdict",
    "EarthModel",
    "GeoCoordinate",
    "LocalFrame",
    "PairedSample",
    "SwarmVerdict",
    "ThresholdConfig",
    "altitude_adjusted_distance",
    "detect",
    "evaluate_pair",
    "evaluate_swarm",
    "local_to_geodetic",
    "match_samples",
    "pair_gps_distance",
    "spherical_distance",
]
