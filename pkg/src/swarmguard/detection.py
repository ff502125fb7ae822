"""GPS-vs-UWB distance cross-check.

For every UAV pair the distance implied by the two reported GPS fixes is
compared with the UWB-measured distance for the same pair and instant.

Per-pair decision, in order:

1. GPS distance below ``zero_tolerance_m``: both UAVs compute (almost) the
   same fix, which only happens when they listen to the same spoofer.
2. ``|d_gps - d_uwb| > dist_threshold_m``: at least one fix is false.
3. Otherwise clean.

A collision alarm (UWB distance below ``collision_tolerance_m``) is raised
independently of the spoofing outcome.

Messages from different instants are associated with a *local* nearest-
timestamp rule (see :func:`nearest_match`); because each decision only
looks at a bounded time neighbourhood, the streaming loop in
:mod:`swarmguard.gcs.loop` reproduces the batch result exactly.
"""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from swarmguard.geodesy import (
    DEFAULT_EARTH,
    EarthModel,
    altitude_adjusted_distance,
    spherical_distance,
    spherical_distance_array,
)
from swarmguard.gcs.messages import PositionReport, RangingReport
from swarmguard.gcs.schedule import ranging_schedule

NEAR_ZERO = "gps-distance-near-zero"
DISCREPANCY = "distance-discrepancy"
CLEAN = "clean"

IDENTICAL_SIGNAL = "identical-signal"
DIVERGENT_SIGNAL = "divergent-signal"
NO_HINT = "none"

#: ``nominal`` adds the two sensors' error bounds (4.9 + 0.3); ``safe`` is
#: the worst benign discrepancy when both fixes err by 4.9 m (2 * 4.9 + 0.3).
THRESHOLD_PRESETS = {"nominal": 5.2, "safe": 10.1}


@dataclass(frozen=True)
class ThresholdConfig:
    dist_threshold_m: float = THRESHOLD_PRESETS["nominal"]
    zero_tolerance_m: float = 0.1
    time_threshold_ms: int = 250
    collision_tolerance_m: float = 0.3

    def __post_init__(self):
        for name in ("dist_threshold_m", "zero_tolerance_m", "time_threshold_ms", "collision_tolerance_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.zero_tolerance_m < self.dist_threshold_m:
            raise ValueError("zero_tolerance_m must be smaller than dist_threshold_m")

    @classmethod
    def preset(cls, name: str, **overrides) -> "ThresholdConfig":
        if name not in THRESHOLD_PRESETS:
            raise ValueError(f"unknown threshold preset {name!r}; expected one of {sorted(THRESHOLD_PRESETS)}")
        return cls(dist_threshold_m=THRESHOLD_PRESETS[name], **overrides)

    @property
    def preset_name(self) -> str | None:
        for name, value in THRESHOLD_PRESETS.items():
            if self.dist_threshold_m == value:
                return name
        return None

    def to_dict(self) -> dict:
        return {
            "dist_threshold_m": self.dist_threshold_m,
            "zero_tolerance_m": self.zero_tolerance_m,
            "time_threshold_ms": self.time_threshold_ms,
            "collision_tolerance_m": self.collision_tolerance_m,
            "preset": self.preset_name,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ThresholdConfig":
        data = dict(data)
        preset = data.pop("preset", None)
        if preset is not None and "dist_threshold_m" not in data:
            data["dist_threshold_m"] = THRESHOLD_PRESETS[preset]
        if "time_threshold_ms" in data:
            data["time_threshold_ms"] = int(data["time_threshold_ms"])
        return cls(**data)


def benign_discrepancy_bound(fix_error_bound_m: float, uwb_error_bound_m: float) -> float:
    """Largest ``|d_gps - d_uwb|`` bounded noise can cause without an attack.

    Each fix may be off by ``fix_error_bound_m`` (3-D), so by the triangle
    inequality the GPS distance is off by at most twice that.
    """
    return 2.0 * fix_error_bound_m + uwb_error_bound_m


@dataclass(frozen=True, slots=True)
class GpsPairDistance:
    uav_a: int
    uav_b: int
    distance_m: float
    time_ms: int

    @property
    def pair(self):
        return (self.uav_a, self.uav_b)


@dataclass(frozen=True, slots=True)
class PairedSample:
    uav_a: int
    uav_b: int
    d_gps_m: float
    d_uwb_m: float
    gps_time_ms: int
    uwb_time_ms: int

    def __post_init__(self):
        if self.d_gps_m < 0 or self.d_uwb_m < 0:
            raise ValueError("distances must be non-negative")
        if self.uav_a == self.uav_b:
            raise ValueError("a sample needs two distinct UAVs")

    @property
    def pair(self):
        return (min(self.uav_a, self.uav_b), max(self.uav_a, self.uav_b))

    @property
    def time_delta_ms(self) -> int:
        return abs(self.gps_time_ms - self.uwb_time_ms)


@dataclass(frozen=True, slots=True)
class DetectionVerdict:
    pair: tuple[int, int]
    spoofed: bool
    criterion: str
    discrepancy_m: float
    collision_alarm: bool
    time_ms: int
    d_gps_m: float = math.nan
    d_uwb_m: float = math.nan

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "spoofed": self.spoofed,
            "criterion": self.criterion,
            "discrepancy_m": self.discrepancy_m,
            "collision_alarm": self.collision_alarm,
            "time_ms": self.time_ms,
            "d_gps_m": self.d_gps_m,
            "d_uwb_m": self.d_uwb_m,
        }


@dataclass(frozen=True)
class SwarmVerdict:
    time_ms: int
    attack_detected: bool
    flagged_pairs: tuple[DetectionVerdict, ...]
    suspected_uavs: frozenset[int]
    scenario_hint: str
    verdicts: tuple[DetectionVerdict, ...] = ()
    missing_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.attack_detected != bool(self.flagged_pairs):
            raise ValueError("attack_detected must equal 'any pair flagged'")

    @property
    def collision_alarms(self) -> list[tuple[int, int]]:
        return [v.pair for v in self.verdicts if v.collision_alarm]

    def to_dict(self) -> dict:
        return {
            "time_ms": self.time_ms,
            "attack_detected": self.attack_detected,
            "flagged_pairs": [
                {k: v for k, v in fv.to_dict().items() if k not in ("spoofed", "time_ms")} for fv in self.flagged_pairs
            ],
            "suspected_uavs": sorted(self.suspected_uavs),
            "scenario_hint": self.scenario_hint,
            "collision_alarms": [list(p) for p in self.collision_alarms],
            "missing_pairs": [list(p) for p in self.missing_pairs],
            "evaluated_pairs": len(self.verdicts),
        }


def pair_gps_distance(
    report_a: PositionReport, report_b: PositionReport, earth: EarthModel = DEFAULT_EARTH
) -> GpsPairDistance:
    """Altitude-adjusted great-circle distance between two fixes.

    The result carries the earlier of the two timestamps.
    """
    if report_a.uav == report_b.uav:
        raise ValueError("pair distance needs two different UAVs")
    a, b = report_a.coordinate, report_b.coordinate
    d = altitude_adjusted_distance(spherical_distance(a, b, earth), a.altitude_m, b.altitude_m)
    lo, hi = sorted((report_a.uav, report_b.uav))
    return GpsPairDistance(lo, hi, d, min(report_a.time_ms, report_b.time_ms))


def _pair_gps_distances(pairs: Sequence[tuple[PositionReport, PositionReport]], earth: EarthModel):
    """Vectorized :func:`pair_gps_distance` over many report pairs."""
    if not pairs:
        return []
    ca = [p[0].coordinate for p in pairs]
    cb = [p[1].coordinate for p in pairs]
    flat = spherical_distance_array(
        [c.latitude_deg for c in ca],
        [c.longitude_deg for c in ca],
        [c.latitude_deg for c in cb],
        [c.longitude_deg for c in cb],
        earth,
    )
    dz = np.array([c.altitude_m for c in ca]) - np.array([c.altitude_m for c in cb])
    dist = np.hypot(flat, dz).tolist()
    out = []
    for (ra, rb), d in zip(pairs, dist):
        lo, hi = sorted((ra.uav, rb.uav))
        out.append(GpsPairDistance(lo, hi, d, min(ra.time_ms, rb.time_ms)))
    return out


def nearest_match(primary: Sequence[int], secondary: Sequence[int], threshold: int) -> dict[int, int]:
    """One-to-one nearest-timestamp association of two *sorted* time lists.

    Each primary proposes the secondary nearest in time (ties go to the
    earlier secondary) if within ``threshold``. A secondary proposed by
    several primaries keeps the closest one (ties: earlier primary); the
    others stay unmatched rather than falling back to a farther candidate,
    so every decision depends only on a bounded time neighbourhood.

    Returns ``{primary_index: secondary_index}``.
    """
    proposals: dict[int, tuple[int, int]] = {}
    for i, t in enumerate(primary):
        lo = bisect.bisect_left(secondary, t - threshold)
        hi = bisect.bisect_right(secondary, t + threshold)
        best = None
        best_dt = None
        for j in range(lo, hi):
            dt = abs(secondary[j] - t)
            if best_dt is None or dt < best_dt:
                best, best_dt = j, dt
        if best is None:
            continue
        current = proposals.get(best)
        if current is None or best_dt < current[1]:
            proposals[best] = (i, best_dt)
    return {i: j for j, (i, _) in proposals.items()}


@dataclass
class MatchDiagnostics:
    unmatched_gps: int = 0
    unmatched_uwb: int = 0
    unpaired_positions: int = 0
    ignored_ranging: int = 0
    coverage_gaps: int = 0

    def to_dict(self):
        return dict(vars(self))

    def add(self, other: "MatchDiagnostics"):
        for k, v in vars(other).items():
            setattr(self, k, getattr(self, k) + v)


def _group_by_pair(items, key):
    groups = defaultdict(list)
    for item in items:
        groups[key(item)].append(item)
    return groups


def match_samples(
    gps_pairs: Iterable[GpsPairDistance],
    uwb_reports: Iterable[RangingReport],
    cfg: ThresholdConfig,
    diagnostics: MatchDiagnostics | None = None,
) -> list[PairedSample]:
    """Associate GPS pair distances with UWB readings of the same pair.

    Only readings within ``cfg.time_threshold_ms`` of each other are
    compared; everything else is counted as unmatched. Output is ordered by
    (GPS time, pair).
    """
    diag = diagnostics if diagnostics is not None else MatchDiagnostics()
    gps_groups = _group_by_pair(gps_pairs, lambda g: g.pair)
    uwb_groups = _group_by_pair(uwb_reports, lambda r: r.pair)
    samples = []
    for pair in sorted(set(gps_groups) | set(uwb_groups)):
        gps = sorted(gps_groups.get(pair, []), key=lambda g: (g.time_ms, g.distance_m))
        uwb = sorted(uwb_groups.get(pair, []), key=lambda r: (r.time_ms, r.distance_mm))
        matches = nearest_match([g.time_ms for g in gps], [r.time_ms for r in uwb], cfg.time_threshold_ms)
        diag.unmatched_gps += len(gps) - len(matches)
        diag.unmatched_uwb += len(uwb) - len(matches)
        for i, j in matches.items():
            g, r = gps[i], uwb[j]
            samples.append(PairedSample(pair[0], pair[1], g.distance_m, r.distance_m, g.time_ms, r.time_ms))
    samples.sort(key=lambda s: (s.gps_time_ms, s.pair))
    return samples


def evaluate_pair(sample: PairedSample, cfg: ThresholdConfig) -> DetectionVerdict:
    discrepancy = abs(sample.d_gps_m - sample.d_uwb_m)
    if sample.d_gps_m < cfg.zero_tolerance_m:
        spoofed, criterion = True, NEAR_ZERO
    elif discrepancy > cfg.dist_threshold_m:
        spoofed, criterion = True, DISCREPANCY
    else:
        spoofed, criterion = False, CLEAN
    return DetectionVerdict(
        pair=sample.pair,
        spoofed=spoofed,
        criterion=criterion,
        discrepancy_m=discrepancy,
        collision_alarm=sample.d_uwb_m < cfg.collision_tolerance_m,
        time_ms=sample.gps_time_ms,
        d_gps_m=sample.d_gps_m,
        d_uwb_m=sample.d_uwb_m,
    )


def attribute_suspects(verdicts: Sequence[DetectionVerdict]) -> frozenset[int]:
    """UAVs whose spoofing best explains the flagged pairs.

    Members of a near-zero pair are always suspected (they share a spoofed
    fix). A flagged pair with only one member not seen in any clean pair
    implicates that member. When attribution stays ambiguous, every member
    of the unexplained pairs is suspected.
    """
    flagged = [v for v in verdicts if v.spoofed]
    suspects = {u for v in flagged if v.criterion == NEAR_ZERO for u in v.pair}
    exonerated = {u for v in verdicts if not v.spoofed for u in v.pair} - suspects

    def uncovered():
        return [v.pair for v in flagged if not (set(v.pair) & suspects)]

    changed = True
    while changed:
        changed = False
        for pair in uncovered():
            candidates = [u for u in pair if u not in exonerated]
            if len(candidates) == 1:
                suspects.add(candidates[0])
                changed = True
    # anything still unexplained is ambiguous: suspect every member
    suspects.update(u for pair in uncovered() for u in pair)
    return frozenset(suspects)


def evaluate_swarm(
    samples: Sequence[PairedSample],
    cfg: ThresholdConfig,
    expected_pairs: Sequence[tuple[int, int]] | None = None,
    time_ms: int | None = None,
) -> SwarmVerdict:
    """Aggregate one epoch's pair verdicts into a swarm verdict."""
    verdicts = tuple(sorted((evaluate_pair(s, cfg) for s in samples), key=lambda v: v.pair))
    if time_ms is None:
        time_ms = min((s.gps_time_ms for s in samples), default=0)
    flagged = tuple(v for v in verdicts if v.spoofed)
    if any(v.criterion == NEAR_ZERO for v in flagged):
        hint = IDENTICAL_SIGNAL
    elif flagged:
        hint = DIVERGENT_SIGNAL
    else:
        hint = NO_HINT
    seen = {v.pair for v in verdicts}
    missing = tuple(p for p in (expected_pairs or ()) if p not in seen)
    return SwarmVerdict(
        time_ms=time_ms,
        attack_detected=bool(flagged),
        flagged_pairs=flagged,
        suspected_uavs=attribute_suspects(verdicts),
        scenario_hint=hint,
        verdicts=verdicts,
        missing_pairs=missing,
    )


def _position_key(r: PositionReport):
    c = r.coordinate
    return (r.time_ms, c.latitude_deg, c.longitude_deg, c.altitude_m)


def pair_positions(
    reports: Iterable[PositionReport],
    pairs: Sequence[tuple[int, int]],
    cfg: ThresholdConfig,
    diagnostics: MatchDiagnostics | None = None,
) -> list[tuple[PositionReport, PositionReport]]:
    """Pick the two fixes to compare for each scheduled pair and instant."""
    diag = diagnostics if diagnostics is not None else MatchDiagnostics()
    by_uav = _group_by_pair(reports, lambda r: r.uav)
    for uav in by_uav:
        by_uav[uav].sort(key=_position_key)
    out = []
    for a, b in pairs:
        ra, rb = by_uav.get(a, []), by_uav.get(b, [])
        matches = nearest_match([r.time_ms for r in ra], [r.time_ms for r in rb], cfg.time_threshold_ms)
        diag.unpaired_positions += len(ra) - len(matches)
        out.extend((ra[i], rb[j]) for i, j in matches.items())
    return out


@dataclass
class DetectionRun:
    verdicts: list[SwarmVerdict]
    diagnostics: MatchDiagnostics = field(default_factory=MatchDiagnostics)

    @property
    def flagged(self) -> list[SwarmVerdict]:
        return [v for v in self.verdicts if v.attack_detected]

    @property
    def fail_safe(self) -> bool:
        return any(v.attack_detected for v in self.verdicts)


def detect(
    messages: Iterable[PositionReport | RangingReport],
    cfg: ThresholdConfig,
    n_uavs: int,
    topology: str = "anchor",
    earth: EarthModel = DEFAULT_EARTH,
) -> DetectionRun:
    """Batch detection over a complete message set.

    One :class:`SwarmVerdict` is produced per distinct position-report
    timestamp (an epoch), in time order.
    """
    pairs = ranging_schedule(n_uavs, topology)
    scheduled = set(pairs)
    diag = MatchDiagnostics()
    positions, ranging = [], []
    for m in messages:
        if isinstance(m, PositionReport):
            positions.append(m)
        elif m.pair in scheduled:
            ranging.append(m)
        else:
            diag.ignored_ranging += 1
    gps_pairs = _pair_gps_distances(pair_positions(positions, pairs, cfg, diag), earth)
    samples = match_samples(gps_pairs, ranging, cfg, diag)
    by_epoch = _group_by_pair(samples, lambda s: s.gps_time_ms)
    verdicts = []
    for t in sorted({p.time_ms for p in positions}):
        verdict = evaluate_swarm(by_epoch.get(t, []), cfg, pairs, time_ms=t)
        diag.coverage_gaps += len(verdict.missing_pairs)
        verdicts.append(verdict)
    return DetectionRun(verdicts, diag)


def with_threshold(cfg: ThresholdConfig, dist_threshold_m: float) -> ThresholdConfig:
    return replace(cfg, dist_threshold_m=dist_threshold_m)
