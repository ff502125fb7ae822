"""Energy overhead of UWB ranging and of shipping the results to the GCS.

Flight-time reduction assumes constant power draw over the flight: the
overhead's share of the battery energy, times the flight duration.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

#: Published per-flight reductions for the default configuration. The
#: constant-power formula gives about half of each (0.060 s and 0.028 s);
#: they are kept for reporting only, never used in computation.
REFERENCE_REDUCTION_S = {"ranging": 0.12, "telemetry": 0.06}


@dataclass(frozen=True)
class EnergyConfig:
    ranging_energy_mj: float = 3.55
    ranging_rate_hz: float = 2.0
    flight_minutes: float = 25.0
    battery_mah: float = 5000.0
    battery_volts: float = 14.8
    message_bytes: int = 50
    radio_kbps: float = 40.0
    radio_ma: float = 55.0
    radio_volts: float = 3.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            # a zero-length flight is allowed; everything else must be positive
            if name == "flight_minutes":
                if value < 0:
                    raise ValueError("flight_minutes must be >= 0")
            elif not value > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def battery_mwh(self) -> float:
        # mAh x V is already mWh
        return self.battery_mah * self.battery_volts

    @property
    def flight_seconds(self) -> float:
        return self.flight_minutes * 60.0

    @property
    def ranging_count(self) -> int:
        """Rangings taken over the whole flight (3000 at defaults)."""
        return round(self.ranging_rate_hz * self.flight_seconds)


@dataclass(frozen=True)
class EnergyReport:
    power_mw: float
    energy_mwh: float
    transmit_seconds: float
    flight_time_reduction_s: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyReport":
        return cls(**{k: float(data[k]) for k in ("power_mw", "energy_mwh", "transmit_seconds", "flight_time_reduction_s")})


def _reduction_s(energy_mwh: float, cfg: EnergyConfig) -> float:
    return energy_mwh / cfg.battery_mwh * cfg.flight_seconds


def ranging_budget(cfg: EnergyConfig) -> EnergyReport:
    power = cfg.ranging_energy_mj * cfg.ranging_rate_hz  # mJ/s == mW
    energy = power * cfg.flight_minutes / 60.0
    return EnergyReport(power, energy, 0.0, _reduction_s(energy, cfg))


def telemetry_budget(cfg: EnergyConfig, message_count: int) -> EnergyReport:
    if message_count < 0:
        raise ValueError("message_count must be >= 0")
    transmit_s = message_count * cfg.message_bytes * 8 / (cfg.radio_kbps * 1000.0)
    on_air = message_count > 0
    power = cfg.radio_volts * cfg.radio_ma if on_air else 0.0
    energy = power * transmit_s / 3600.0
    return EnergyReport(power, energy, transmit_s, _reduction_s(energy, cfg))


def combined_overhead(cfg: EnergyConfig, message_count: int | None = None) -> EnergyReport:
    """Ranging plus telemetry for one UAV and one flight.

    ``power_mw`` here is the flight-averaged draw of both (0 for a
    zero-length flight). ``message_count`` defaults to one message per
    ranging.
    """
    if message_count is None:
        message_count = cfg.ranging_count
    ranging = ranging_budget(cfg)
    telemetry = telemetry_budget(cfg, message_count)
    energy = ranging.energy_mwh + telemetry.energy_mwh
    hours = cfg.flight_minutes / 60.0
    return EnergyReport(
        power_mw=energy / hours if hours > 0 else 0.0,
        energy_mwh=energy,
        transmit_seconds=telemetry.transmit_seconds,
        flight_time_reduction_s=ranging.flight_time_reduction_s + telemetry.flight_time_reduction_s,
    )


def energy_summary(cfg: EnergyConfig, message_count: int | None = None) -> dict:
    if message_count is None:
        message_count = cfg.ranging_count
    ranging = ranging_budget(cfg)
    telemetry = telemetry_budget(cfg, message_count)
    combined = combined_overhead(cfg, message_count)
    return {
        "config": asdict(cfg),
        "message_count": message_count,
        "battery_mwh": cfg.battery_mwh,
        "ranging": ranging.to_dict(),
        "telemetry": telemetry.to_dict(),
        "combined": combined.to_dict(),
        "under_one_second": combined.flight_time_reduction_s < 1.0,
        "reference_reduction_s": dict(REFERENCE_REDUCTION_S),
    }
