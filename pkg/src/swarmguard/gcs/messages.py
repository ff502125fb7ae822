"""Telemetry messages exchanged between the swarm and the ground station."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from swarmguard.geodesy import GeoCoordinate

U16_MAX = 0xFFFF
U32_MAX = 0xFFFF_FFFF
U64_MAX = 0xFFFF_FFFF_FFFF_FFFF

#: Nominal UWB range (150 m) plus headroom for ranging error.
MAX_DISTANCE_MM = 151_000


def _check_uav(name, value):
    if not isinstance(value, (int, np.integer)) or not 1 <= value <= U16_MAX:
        raise ValueError(f"{name} must be an integer in [1, {U16_MAX}], got {value!r}")


def _check_time(value):
    if not isinstance(value, (int, np.integer)) or not 0 <= value <= U64_MAX:
        raise ValueError(f"time_ms must be an unsigned 64-bit integer, got {value!r}")


@dataclass(frozen=True, slots=True)
class PositionReport:
    """GPS fix reported by one UAV.

    The altitude travels as float32 on the wire, so it is rounded to the
    nearest float32 on construction; that keeps decode(encode(m)) == m.
    """

    uav: int
    time_ms: int
    coordinate: GeoCoordinate

    def __post_init__(self):
        _check_uav("uav", self.uav)
        _check_time(self.time_ms)
        alt = self.coordinate.altitude_m
        alt32 = float(np.float32(alt))
        if not np.isfinite(alt32):
            raise ValueError(f"altitude {alt} does not fit in float32")
        if alt32 != alt:
            c = self.coordinate
            object.__setattr__(self, "coordinate", GeoCoordinate(c.latitude_deg, c.longitude_deg, alt32))


@dataclass(frozen=True, slots=True)
class RangingReport:
    """UWB distance between two UAVs, canonical order ``uav_a < uav_b``."""

    uav_a: int
    uav_b: int
    time_ms: int
    distance_mm: int

    def __post_init__(self):
        _check_uav("uav_a", self.uav_a)
        _check_uav("uav_b", self.uav_b)
        if self.uav_a >= self.uav_b:
            raise ValueError(f"ranging pair must satisfy uav_a < uav_b, got ({self.uav_a}, {self.uav_b})")
        _check_time(self.time_ms)
        if not isinstance(self.distance_mm, (int, np.integer)) or not 0 <= self.distance_mm <= MAX_DISTANCE_MM:
            raise ValueError(f"distance_mm must be an integer in [0, {MAX_DISTANCE_MM}], got {self.distance_mm!r}")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.uav_a, self.uav_b)

    @property
    def distance_m(self) -> float:
        return self.distance_mm / 1000.0


Message = PositionReport | RangingReport


def message_time(msg: Message) -> int:
    return msg.time_ms
