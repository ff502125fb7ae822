"""Online detection at the ground station.

Messages may arrive out of timestamp order by up to ``time_threshold_ms``.
The loop buffers them and only finalizes an epoch once every message that
could influence its verdict must already have arrived; the verdict stream
is therefore identical to a batch :func:`~swarmguard.detection.detect` over
the whole stream, whatever the (bounded) arrival order.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from swarmguard.detection import DetectionVerdict, SwarmVerdict, ThresholdConfig, detect
from swarmguard.geodesy import DEFAULT_EARTH, EarthModel
from swarmguard.gcs.messages import Message, PositionReport

# Matching decisions reach at most ~6 time thresholds away (position
# pairing, then UWB association, each with one round of conflict
# resolution); 12 leaves ample margin.
_HORIZON_FACTOR = 12


class DetectionLoop:
    def __init__(
        self,
        n_uavs: int,
        thresholds: ThresholdConfig,
        topology: str = "anchor",
        earth: EarthModel = DEFAULT_EARTH,
    ):
        self.n_uavs = n_uavs
        self.thresholds = thresholds
        self.topology = topology
        self.earth = earth
        self.horizon_ms = _HORIZON_FACTOR * thresholds.time_threshold_ms
        self.disorder_ms = thresholds.time_threshold_ms
        self.late_messages = 0
        self._buffer: list[Message] = []
        self._watermark = -math.inf
        self._done_below = -math.inf
        self._pending_min = math.inf

    def feed(self, msg: Message) -> list[SwarmVerdict]:
        if msg.time_ms < self._done_below:
            self.late_messages += 1
            return []
        self._buffer.append(msg)
        self._watermark = max(self._watermark, msg.time_ms)
        if isinstance(msg, PositionReport):
            self._pending_min = min(self._pending_min, msg.time_ms)
        safe_below = self._watermark - self.disorder_ms - self.horizon_ms
        if self._pending_min < safe_below:
            return self._finalize(safe_below)
        return []

    def close(self) -> list[SwarmVerdict]:
        return self._finalize(math.inf)

    def _finalize(self, below) -> list[SwarmVerdict]:
        run = detect(self._buffer, self.thresholds, self.n_uavs, self.topology, self.earth)
        out = [v for v in run.verdicts if self._done_below <= v.time_ms < below]
        self._done_below = below
        keep_from = below - self.horizon_ms
        self._buffer = [m for m in self._buffer if m.time_ms >= keep_from]
        self._pending_min = min(
            (m.time_ms for m in self._buffer if isinstance(m, PositionReport) and m.time_ms >= below),
            default=math.inf,
        )
        return out


class VerdictLog:
    """JSONL verdict log: a header record, then one line per swarm verdict.

    The header echoes the configuration and carries the latched
    ``fail_safe`` flag, so the file is assembled when the log is closed.
    """

    def __init__(self, config: dict | None = None):
        self.config = config or {}
        self.fail_safe = False
        self.fail_safe_since_ms: int | None = None
        self._lines: list[str] = []

    def append(self, verdict: SwarmVerdict):
        if verdict.attack_detected and not self.fail_safe:
            self.fail_safe = True
            self.fail_safe_since_ms = verdict.time_ms
        self._lines.append(json.dumps(verdict.to_dict()))

    def __len__(self):
        return len(self._lines)

    def header(self) -> dict:
        return {
            "record": "header",
            "config": self.config,
            "fail_safe": self.fail_safe,
            "fail_safe_since_ms": self.fail_safe_since_ms,
            "epochs": len(self._lines),
        }

    def write(self, fh: TextIO):
        fh.write(json.dumps(self.header()) + "\n")
        for line in self._lines:
            fh.write(line + "\n")

    def dumps(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def save(self, path: str | os.PathLike):
        with open(path, "w", encoding="utf-8") as fh:
            self.write(fh)


def read_verdict_log(path: str | os.PathLike) -> tuple[dict, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    return records[0], records[1:]


@dataclass
class LoopResult:
    verdicts: list[SwarmVerdict]
    log: VerdictLog
    late_messages: int = 0
    n_uavs: int = 0
    criteria: dict[str, int] = field(default_factory=dict)

    @property
    def fail_safe(self) -> bool:
        return self.log.fail_safe

    @property
    def flagged(self) -> list[SwarmVerdict]:
        return [v for v in self.verdicts if v.attack_detected]

    def summary(self) -> dict:
        return {
            "epochs": len(self.verdicts),
            "flagged_epochs": len(self.flagged),
            "criteria": dict(sorted(self.criteria.items())),
            "fail_safe": self.fail_safe,
            "fail_safe_since_ms": self.log.fail_safe_since_ms,
            "late_messages": self.late_messages,
            "coverage_gaps": sum(len(v.missing_pairs) for v in self.verdicts),
        }


def run_detection_loop(
    messages: Iterable[Message],
    thresholds: ThresholdConfig,
    topology: str = "anchor",
    n_uavs: int | None = None,
    earth: EarthModel = DEFAULT_EARTH,
    config_echo: dict | None = None,
) -> LoopResult:
    """Feed a message stream through the online loop and log every verdict.

    Without ``n_uavs`` the stream is materialized and the swarm size taken
    as the largest UAV id seen.
    """
    if n_uavs is None:
        messages = list(messages)
        ids = [m.uav for m in messages if isinstance(m, PositionReport)]
        ids += [m.uav_b for m in messages if not isinstance(m, PositionReport)]
        n_uavs = max(ids, default=2)
    echo = {"thresholds": thresholds.to_dict(), "topology": topology, "n_uavs": n_uavs}
    echo.update(config_echo or {})
    loop = DetectionLoop(n_uavs, thresholds, topology, earth)
    log = VerdictLog(echo)
    verdicts: list[SwarmVerdict] = []
    for msg in messages:
        verdicts.extend(loop.feed(msg))
    verdicts.extend(loop.close())
    criteria: dict[str, int] = {}
    for v in verdicts:
        log.append(v)
        for pv in v.verdicts:
            criteria[pv.criterion] = criteria.get(pv.criterion, 0) + 1
    return LoopResult(verdicts, log, loop.late_messages, n_uavs, criteria)


def verdict_csv(verdicts: Iterable[SwarmVerdict]) -> str:
    lines = ["time_ms,pair,spoofed,criterion,discrepancy_m"]
    for sv in verdicts:
        for v in sv.verdicts:
            lines.append(_csv_row(v))
    return "\n".join(lines) + "\n"


def _csv_row(v: DetectionVerdict) -> str:
    return f"{v.time_ms},{v.pair[0]}-{v.pair[1]},{str(v.spoofed).lower()},{v.criterion},{v.discrepancy_m!r}"
