"""Great-circle distances and the simulator's local tangent frame.

Coordinates are exchanged in degrees; radians only exist inside the
distance formula. The spherical law of cosines is evaluated in numpy's
extended precision (``np.longdouble``) because in plain doubles it loses
all accuracy below a few meters, which is exactly where the near-zero
spoofing criterion operates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_MEAN_RADIUS_M = 6_371_000.0

#: Tangent-plane offsets beyond this are rejected (flat-earth validity).
LOCAL_FRAME_LIMIT_M = 10_000.0

_LD = np.longdouble
_PI_LD = np.arccos(_LD(-1))
_DEG_TO_RAD_LD = _PI_LD / _LD(180)


@dataclass(frozen=True, slots=True)
class GeoCoordinate:
    """Latitude/longitude in degrees plus altitude in meters."""

    latitude_deg: float
    longitude_deg: float
    altitude_m: float = 0.0

    def __post_init__(self):
        for name in ("latitude_deg", "longitude_deg", "altitude_m"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(f"latitude_deg out of [-90, 90]: {self.latitude_deg}")
        if not -180.0 <= self.longitude_deg <= 180.0:
            raise ValueError(f"longitude_deg out of [-180, 180]: {self.longitude_deg}")

    def to_dict(self) -> dict:
        return {
            "latitude_deg": self.latitude_deg,
            "longitude_deg": self.longitude_deg,
            "altitude_m": self.altitude_m,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeoCoordinate":
        return cls(
            float(data["latitude_deg"]),
            float(data["longitude_deg"]),
            float(data.get("altitude_m", 0.0)),
        )


@dataclass(frozen=True, slots=True)
class EarthModel:
    mean_radius_m: float = EARTH_MEAN_RADIUS_M

    def __post_init__(self):
        if not (math.isfinite(self.mean_radius_m) and self.mean_radius_m > 0):
            raise ValueError(f"mean_radius_m must be positive, got {self.mean_radius_m}")


DEFAULT_EARTH = EarthModel()


@dataclass(frozen=True, slots=True)
class LocalFrame:
    """East/north/up tangent plane anchored at ``origin``."""

    origin: GeoCoordinate
    earth: EarthModel = DEFAULT_EARTH

    def __post_init__(self):
        if not -90.0 < self.origin.latitude_deg < 90.0:
            raise ValueError("local frame origin must not sit on a pole")


def spherical_distance(
    a: GeoCoordinate, b: GeoCoordinate, earth: EarthModel = DEFAULT_EARTH
) -> float:
    """Great-circle distance in meters by the spherical law of cosines.

    Altitude is ignored. The cosine sum is clamped to [-1, 1] so nearly
    coincident points never produce NaN.
    """
    if a.latitude_deg == b.latitude_deg and a.longitude_deg == b.longitude_deg:
        return 0.0
    phi_a = _LD(a.latitude_deg) * _DEG_TO_RAD_LD
    phi_b = _LD(b.latitude_deg) * _DEG_TO_RAD_LD
    # abs() keeps the result bit-identical under argument swap
    d_lambda = abs(_LD(b.longitude_deg) - _LD(a.longitude_deg)) * _DEG_TO_RAD_LD
    cos_angle = np.sin(phi_a) * np.sin(phi_b) + np.cos(phi_a) * np.cos(phi_b) * np.cos(d_lambda)
    cos_angle = min(max(cos_angle, _LD(-1)), _LD(1))
    return float(np.arccos(cos_angle) * _LD(earth.mean_radius_m))


def spherical_distance_array(lat_a, lon_a, lat_b, lon_b, earth: EarthModel = DEFAULT_EARTH):
    """Vectorized :func:`spherical_distance` over arrays of degrees.

    Returns a float64 array. Agrees element-wise with the scalar version.
    """
    lat_a = np.asarray(lat_a, dtype=_LD)
    lat_b = np.asarray(lat_b, dtype=_LD)
    lon_a = np.asarray(lon_a, dtype=_LD)
    lon_b = np.asarray(lon_b, dtype=_LD)
    same = (lat_a == lat_b) & (lon_a == lon_b)
    phi_a = lat_a * _DEG_TO_RAD_LD
    phi_b = lat_b * _DEG_TO_RAD_LD
    d_lambda = np.abs(lon_b - lon_a) * _DEG_TO_RAD_LD
    cos_angle = np.sin(phi_a) * np.sin(phi_b) + np.cos(phi_a) * np.cos(phi_b) * np.cos(d_lambda)
    cos_angle = np.clip(cos_angle, _LD(-1), _LD(1))
    out = (np.arccos(cos_angle) * _LD(earth.mean_radius_m)).astype(np.float64)
    return np.where(same, 0.0, out)


def altitude_adjusted_distance(d_flat: float, alt_a: float, alt_b: float) -> float:
    """Hypotenuse of the ground distance and the altitude difference."""
    if d_flat < 0 or not math.isfinite(d_flat):
        raise ValueError(f"d_flat must be a finite non-negative distance, got {d_flat}")
    if not (math.isfinite(alt_a) and math.isfinite(alt_b)):
        raise ValueError("altitudes must be finite")
    return math.hypot(d_flat, alt_a - alt_b)


def _check_offsets(east_m, north_m):
    if isinstance(east_m, float) and isinstance(north_m, float):
        if not (abs(east_m) <= LOCAL_FRAME_LIMIT_M and abs(north_m) <= LOCAL_FRAME_LIMIT_M):
            raise ValueError(
                "local offsets must be finite and within the "
                f"{LOCAL_FRAME_LIMIT_M:.0f} m tangent-plane validity bound"
            )
        return
    if not (np.all(np.isfinite(east_m)) and np.all(np.isfinite(north_m))):
        raise ValueError("local offsets must be finite")
    if np.any(np.abs(east_m) > LOCAL_FRAME_LIMIT_M) or np.any(np.abs(north_m) > LOCAL_FRAME_LIMIT_M):
        raise ValueError(
            f"local offsets exceed the {LOCAL_FRAME_LIMIT_M:.0f} m tangent-plane validity bound"
        )


def local_to_geodetic(frame: LocalFrame, east_m: float, north_m: float, up_m: float = 0.0) -> GeoCoordinate:
    """Map a tangent-plane offset to a geodetic coordinate (flat-earth)."""
    _check_offsets(float(east_m), float(north_m))
    origin = frame.origin
    radius = frame.earth.mean_radius_m
    lat = origin.latitude_deg + north_m / radius * (180.0 / math.pi)
    lon = origin.longitude_deg + east_m / (radius * math.cos(math.radians(origin.latitude_deg))) * (
        180.0 / math.pi
    )
    return GeoCoordinate(lat, lon, origin.altitude_m + up_m)


def local_to_geodetic_array(frame: LocalFrame, east_m, north_m, up_m):
    """Vectorized :func:`local_to_geodetic`; returns (lat, lon, alt) arrays."""
    east_m = np.asarray(east_m, dtype=float)
    north_m = np.asarray(north_m, dtype=float)
    _check_offsets(east_m, north_m)
    origin = frame.origin
    radius = frame.earth.mean_radius_m
    lat = origin.latitude_deg + north_m / radius * (180.0 / math.pi)
    lon = origin.longitude_deg + east_m / (radius * math.cos(math.radians(origin.latitude_deg))) * (
        180.0 / math.pi
    )
    alt = origin.altitude_m + np.asarray(up_m, dtype=float)
    return lat, lon, alt


def geodetic_to_local(frame: LocalFrame, coord: GeoCoordinate) -> tuple[float, float, float]:
    """Inverse of :func:`local_to_geodetic` (no validity bound applied)."""
    origin = frame.origin
    radius = frame.earth.mean_radius_m
    north = (coord.latitude_deg - origin.latitude_deg) * (math.pi / 180.0) * radius
    east = (
        (coord.longitude_deg - origin.longitude_deg)
        * (math.pi / 180.0)
        * radius
        * math.cos(math.radians(origin.latitude_deg))
    )
    return east, north, coord.altitude_m - origin.altitude_m
