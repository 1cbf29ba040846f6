"""Link budgets: antenna gains, received powers, noise, blockage."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, InvalidScenarioError
from .params import SystemParams
from .scenario import MIN_LINK_DISTANCE_M, Scenario, distance, off_boresight_angles

LN2 = math.log(2.0)

# Ratio of main-lobe width to half-power beamwidth for the Gaussian
# main-lobe / flat side-lobe directional antenna model.
MAIN_LOBE_FACTOR = 2.6


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class AntennaPattern:
    """Directional antenna: Gaussian main lobe + constant side-lobe floor."""

    halfpower_beamwidth_deg: float
    main_lobe_width_deg: float
    max_gain_db: float
    side_lobe_gain_db: float

    @classmethod
    def from_beamwidth(cls, halfpower_beamwidth_deg: float) -> "AntennaPattern":
        if not 0 < halfpower_beamwidth_deg <= 180:
            raise ConfigError("half-power beamwidth must be in (0, 180]")
        t = halfpower_beamwidth_deg
        max_gain = 20.0 * math.log10(1.6162 / math.sin(math.radians(t / 2.0)))
        side_lobe = -0.4111 * math.log(t) - 10.579
        return cls(t, MAIN_LOBE_FACTOR * t, max_gain, side_lobe)


def antenna_gain_db(theta_deg: float, pattern: AntennaPattern) -> float:
    """Gain (dB) at off-boresight angle theta_deg in [0, 180].

    The main-lobe branch wins at the junction theta = main_lobe_width / 2.
    """
    if not 0.0 <= theta_deg <= 180.0:
        raise ValueError(f"angle {theta_deg} outside [0, 180]")
    if theta_deg <= pattern.main_lobe_width_deg / 2.0:
        ratio = 2.0 * theta_deg / pattern.halfpower_beamwidth_deg
        return pattern.max_gain_db - 3.01 * ratio * ratio
    return pattern.side_lobe_gain_db


def friis_constant(params: SystemParams) -> float:
    """The (lambda / 4 pi)^2 free-space coefficient, optionally scaled."""
    lam = params.mmwave_wavelength_m
    return params.friis_constant_scale * (lam / (4.0 * math.pi)) ** 2


def _check_distance(distance_m: float) -> None:
    if distance_m < MIN_LINK_DISTANCE_M:
        raise InvalidScenarioError(
            f"link distance {distance_m} m below {MIN_LINK_DISTANCE_M} m"
        )


def cellular_rx_power(tx_power_watts: float, tx_gain_dbi: float,
                      rx_gain_dbi: float, distance_m: float,
                      params: SystemParams,
                      channel_gain: float | None = None) -> float:
    """|h0|^2 * Gt * Gr * l^-n * P for a cellular-band link, watts.

    ``channel_gain`` is the sampled |h0|^2; None means the average-channel
    value 1.0 (also the default in Rayleigh mode when no draw is supplied).
    """
    _check_distance(distance_m)
    h2 = 1.0 if channel_gain is None else channel_gain
    return (h2 * db_to_linear(tx_gain_dbi) * db_to_linear(rx_gain_dbi)
            * distance_m ** (-params.pathloss_exponent) * tx_power_watts)


def mmwave_rx_power(i: int, j: int, scenario: Scenario,
                    params: SystemParams) -> float:
    """Power (watts) received at pair i's receiver from pair j's transmitter.

    i == j is the desired boresight link (both gains at pattern maximum);
    i != j is cross-link interference scaled by the MUI factor, with gains
    evaluated at the geometric off-boresight angles.
    """
    pattern = AntennaPattern.from_beamwidth(params.halfpower_beamwidth_deg)
    p_m = dbm_to_watts(params.mmwave_tx_power_dbm)
    k0 = friis_constant(params)
    link_i = (scenario.d2d_tx_positions[i], scenario.d2d_rx_positions[i])
    link_j = (scenario.d2d_tx_positions[j], scenario.d2d_rx_positions[j])
    if i == j:
        dist = distance(link_i[0], link_i[1])
        _check_distance(dist)
        gain = db_to_linear(pattern.max_gain_db)
        return k0 * gain * gain * dist ** (-params.pathloss_exponent) * p_m
    dist = distance(link_j[0], link_i[1])
    _check_distance(dist)
    tx_angle, rx_angle = off_boresight_angles(link_j, link_i)
    g_t = db_to_linear(antenna_gain_db(tx_angle, pattern))
    g_r = db_to_linear(antenna_gain_db(rx_angle, pattern))
    return (params.mui_factor * k0 * g_t * g_r
            * dist ** (-params.pathloss_exponent) * p_m)


def noise_power(bandwidth_hz: float, density: float,
                density_units: str) -> float:
    """Thermal noise (watts) from a spectral density over a bandwidth.

    ``density_units`` is 'dbm_per_hz' or 'dbm_per_mhz'.
    """
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be > 0")
    if density_units == "dbm_per_hz":
        return dbm_to_watts(density) * bandwidth_hz
    if density_units == "dbm_per_mhz":
        return dbm_to_watts(density) * (bandwidth_hz / 1e6)
    raise ValueError(f"unknown density units {density_units!r}")


def cellular_noise_power(params: SystemParams) -> float:
    return noise_power(params.cell_bandwidth_hz, params.cell_noise_density,
                       "dbm_per_hz")


def mmwave_noise_power(params: SystemParams) -> float:
    return noise_power(params.mmwave_bandwidth_hz,
                       params.mmwave_noise_density, "dbm_per_mhz")


def blockage_probability(distance_m: float, beta: float) -> float:
    """1 - exp(-beta * l): chance the LOS path of length l is obstructed."""
    if distance_m < 0 or beta < 0:
        raise ValueError("distance and beta must be >= 0")
    return -math.expm1(-beta * distance_m)


@dataclass(frozen=True)
class LinkBudget:
    """One link's received, interference, and noise powers plus its SINR."""

    rx_power_watts: float
    interference_power_watts: float
    noise_power_watts: float

    @property
    def sinr(self) -> float:
        return self.rx_power_watts / (
            self.interference_power_watts + self.noise_power_watts)
