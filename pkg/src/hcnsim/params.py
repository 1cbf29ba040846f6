"""System-wide physical and algorithmic constants."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

from .errors import ConfigError


class FadingMode(str, enum.Enum):
    """Small-scale fading treatment for cellular-band links.

    AVERAGE uses the mean channel power (|h0|^2 = 1); RAYLEIGH draws an
    independent exponential(1) power per link when the scenario is generated.
    """

    AVERAGE = "average"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class SystemParams:
    """All constants of one simulated system.

    Defaults are the standard 60 GHz mmWave + LTE-style cellular setup:
    2160 MHz / 15 kHz bandwidths, -134 dBm/MHz / -174 dBm/Hz noise densities,
    20 / 23 dBm transmit powers, free-space path loss (n = 2), 30 degree
    half-power beamwidth, blockage 0.01 per meter.
    """

    num_cellular: int = 8
    num_d2d: int = 30
    side_length: float = 500.0
    # Max |dx| and |dy| between a D2D transmitter and its receiver; the
    # diagonal maximum separation is d2d_axis_offset_max * sqrt(2).
    d2d_axis_offset_max: float = 10.0
    cell_bandwidth_hz: float = 15e3
    mmwave_bandwidth_hz: float = 2160e6
    cell_noise_density: float = -174.0  # dBm/Hz
    mmwave_noise_density: float = -134.0  # dBm/MHz
    cell_tx_power_dbm: float = 23.0
    mmwave_tx_power_dbm: float = 20.0
    pathloss_exponent: float = 2.0
    mui_factor: float = 1.0
    halfpower_beamwidth_deg: float = 30.0
    blockage_beta: float = 0.01
    device_gain_dbi: float = 0.5
    bs_gain_dbi: float = 14.0
    mmwave_wavelength_m: float = 0.005
    # Scale on the (lambda / 4 pi)^2 free-space constant; 1.0 = Friis form.
    friis_constant_scale: float = 1.0
    fading_mode: FadingMode = FadingMode.AVERAGE
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fading_mode", FadingMode(self.fading_mode))

    def validate(self) -> None:
        if self.num_cellular < 0 or self.num_d2d < 0:
            raise ConfigError("user counts must be >= 0")
        if self.side_length <= 0:
            raise ConfigError("side_length must be > 0")
        if self.d2d_axis_offset_max < 0:
            raise ConfigError("d2d_axis_offset_max must be >= 0")
        if self.d2d_axis_offset_max * math.sqrt(2) > self.side_length:
            raise ConfigError("D2D pairs must fit inside the deployment area")
        for name in ("cell_bandwidth_hz", "mmwave_bandwidth_hz",
                     "mmwave_wavelength_m", "mui_factor",
                     "friis_constant_scale"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if self.blockage_beta < 0:
            raise ConfigError("blockage_beta must be >= 0")
        if not 0 < self.halfpower_beamwidth_deg <= 180:
            raise ConfigError("halfpower_beamwidth_deg must be in (0, 180]")
        if self.pathloss_exponent <= 0:
            raise ConfigError("pathloss_exponent must be > 0")
        if self.rng_seed < 0:
            raise ConfigError("rng_seed must be >= 0")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["fading_mode"] = self.fading_mode.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown parameter fields: {sorted(unknown)}")
        try:
            params = cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        params.validate()
        return params
