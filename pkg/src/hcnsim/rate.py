"""Per-user rates, coalition values, and the system sum rate."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    AntennaPattern,
    LN2,
    antenna_gain_db,
    cellular_noise_power,
    db_to_linear,
    dbm_to_watts,
    friis_constant,
    mmwave_noise_power,
)
from .errors import InvalidScenarioError
from .params import FadingMode, SystemParams
from .scenario import MIN_LINK_DISTANCE_M, Scenario


@dataclass(frozen=True)
class Partition:
    """Assignment of every D2D pair to one coalition.

    Coalition ids are 1..C+1; ids 1..C share the corresponding cellular
    user's uplink resource and id C+1 is the shared mmWave band. D2D pair
    indices are 0-based.
    """

    num_cellular: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        for a in self.assignment:
            if not 1 <= a <= self.num_cellular + 1:
                raise ValueError(f"coalition id {a} out of range")

    @property
    def num_d2d(self) -> int:
        return len(self.assignment)

    @property
    def mmwave_id(self) -> int:
        return self.num_cellular + 1

    def members(self, coalition_id: int) -> tuple[int, ...]:
        return tuple(d for d, a in enumerate(self.assignment)
                     if a == coalition_id)

    def coalitions(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {c: [] for c in range(1, self.num_cellular + 2)}
        for d, a in enumerate(self.assignment):
            out[a].append(d)
        return {c: tuple(m) for c, m in out.items()}


@dataclass(frozen=True)
class RateReport:
    """Rates (bit/s) of one partition on one scenario.

    ``per_d2d_rate`` is pre-outage; the blockage factor enters only the
    mmWave coalition value. ``per_coalition_value`` is indexed by
    coalition id - 1 and sums to ``system_sum_rate``.
    """

    per_cellular_rate: tuple[float, ...]
    per_d2d_rate: tuple[float, ...]
    per_coalition_value: tuple[float, ...]
    system_sum_rate: float

    def to_json(self) -> str:
        return json.dumps({
            "per_cellular_rate": list(self.per_cellular_rate),
            "per_d2d_rate": list(self.per_d2d_rate),
            "per_coalition_value": list(self.per_coalition_value),
            "system_sum_rate": self.system_sum_rate,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RateReport":
        doc = json.loads(text)
        return cls(
            tuple(doc["per_cellular_rate"]),
            tuple(doc["per_d2d_rate"]),
            tuple(doc["per_coalition_value"]),
            doc["system_sum_rate"],
        )


def _log2_1p(x):
    # log2(1 + x) via log1p for precision at tiny SINR.
    return np.log1p(x) / LN2


def _pairwise_distances(tx: np.ndarray, rx: np.ndarray) -> np.ndarray:
    diff = tx[:, None, :] - rx[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


class LinkTables:
    """Precomputed per-link powers for one (scenario, params) pair.

    All arrays are linear watts. Matrix entries are indexed transmitter
    first, receiver second; self-interference diagonals are zeroed.
    """

    def __init__(self, scenario: Scenario, params: SystemParams):
        params.validate()
        C, D = scenario.num_cellular, scenario.num_d2d
        if C != params.num_cellular or D != params.num_d2d:
            raise InvalidScenarioError("scenario dimensions do not match params")
        self.scenario = scenario
        self.params = params
        self.C, self.D = C, D
        self.wc = params.cell_bandwidth_hz
        self.wm = params.mmwave_bandwidth_hz
        self.noise_c = cellular_noise_power(params)
        self.noise_m = mmwave_noise_power(params)

        n = params.pathloss_exponent
        p_c = dbm_to_watts(params.cell_tx_power_dbm)
        p_m = dbm_to_watts(params.mmwave_tx_power_dbm)
        g0 = db_to_linear(params.device_gain_dbi)
        gb = db_to_linear(params.bs_gain_dbi)
        k0 = friis_constant(params)

        bs = scenario.bs_position
        cell = scenario.cellular_positions.reshape(-1, 2)
        tx = scenario.d2d_tx_positions.reshape(-1, 2)
        rx = scenario.d2d_rx_positions.reshape(-1, 2)

        l_cb = np.hypot(*(cell - bs).T) if C else np.zeros(0)
        l_db = np.hypot(*(tx - bs).T) if D else np.zeros(0)
        l_cd = _pairwise_distances(cell, rx) if C and D else np.zeros((C, D))
        l_dd = _pairwise_distances(tx, rx) if D else np.zeros((D, D))

        used = np.concatenate([l_cb, l_db, l_cd.ravel(), l_dd.ravel()])
        if used.size and used.min() < MIN_LINK_DISTANCE_M:
            raise InvalidScenarioError(
                f"link distance below {MIN_LINK_DISTANCE_M} m in scenario")

        if params.fading_mode is FadingMode.RAYLEIGH:
            if scenario.channel_gains is None:
                raise InvalidScenarioError(
                    "Rayleigh mode needs scenario channel_gains")
            g = scenario.channel_gains
            h_cb, h_db = g["cell_bs"], g["d2d_bs"]
            h_cd, h_dd = g["cell_d2d"], g["d2d_d2d"]
        else:
            h_cb, h_db = np.ones(C), np.ones(D)
            h_cd, h_dd = np.ones((C, D)), np.ones((D, D))

        # Cellular band.
        self.bs_signal = h_cb * g0 * gb * l_cb ** (-n) * p_c  # (C,)
        self.bs_interference = h_db * g0 * gb * l_db ** (-n) * p_c  # (D,)
        self.cell_to_d2d = h_cd * g0 * g0 * l_cd ** (-n) * p_c  # (C, D)
        dd_cell = h_dd * g0 * g0 * l_dd ** (-n) * p_c  # (D, D)
        self.d2d_cell_signal = np.diag(dd_cell).copy() if D else np.zeros(0)
        self.d2d_to_d2d_cell = dd_cell.copy()
        np.fill_diagonal(self.d2d_to_d2d_cell, 0.0)

        # mmWave band.
        pattern = AntennaPattern.from_beamwidth(params.halfpower_beamwidth_deg)
        g_max = db_to_linear(pattern.max_gain_db)
        own = np.diag(l_dd).copy() if D else np.zeros(0)
        self.mm_signal = k0 * g_max * g_max * own ** (-n) * p_m  # (D,)
        self.mm_interference = np.zeros((D, D))
        if D:
            bore = rx - tx  # boresight of each transmitter (and -receiver)
            to_rx = rx[None, :, :] - tx[:, None, :]  # tx j -> rx i, (j, i, 2)
            to_tx = tx[:, None, :] - rx[None, :, :]  # rx i -> tx j, (j, i, 2)
            tx_ang = _angles_deg(bore[:, None, :], to_rx)
            rx_ang = _angles_deg((tx - rx)[None, :, :], to_tx)
            g_t = _gain_linear(tx_ang, pattern)
            g_r = _gain_linear(rx_ang, pattern)
            self.mm_interference = (params.mui_factor * k0 * g_t * g_r
                                    * l_dd ** (-n) * p_m)
            np.fill_diagonal(self.mm_interference, 0.0)
        self.pout = -np.expm1(-params.blockage_beta * own)


def _angles_deg(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    nu = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    denom = nu * nv
    # Zero cross-vectors only occur on the (ignored) diagonal.
    safe = np.where(denom == 0.0, 1.0, denom)
    cos = np.clip((u * v).sum(axis=-1) / safe, -1.0, 1.0)
    return np.degrees(np.arccos(cos))


def _gain_linear(theta_deg: np.ndarray, pattern: AntennaPattern) -> np.ndarray:
    ratio = 2.0 * theta_deg / pattern.halfpower_beamwidth_deg
    main = pattern.max_gain_db - 3.01 * ratio * ratio
    db = np.where(theta_deg <= pattern.main_lobe_width_deg / 2.0,
                  main, pattern.side_lobe_gain_db)
    return 10.0 ** (db / 10.0)


def link_tables(scenario: Scenario, params: SystemParams) -> LinkTables:
    return LinkTables(scenario, params)


def _as_tables(scenario, params, tables) -> LinkTables:
    if tables is None:
        return LinkTables(scenario, params)
    return tables


def cellular_coalition_value(c: int, members, scenario: Scenario,
                             params: SystemParams,
                             tables: LinkTables | None = None,
                             ) -> tuple[float, tuple[float, ...], float]:
    """Rates of cellular user c (1-based) sharing with ``members``.

    Returns (R_c, per-member D2D rates in member order, coalition value).
    """
    t = _as_tables(scenario, params, tables)
    if not 1 <= c <= t.C:
        raise ValueError(f"cellular index {c} out of range 1..{t.C}")
    idx = np.asarray(sorted(members), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= t.D):
        raise ValueError("D2D index out of range")
    ci = c - 1
    bs_int = t.bs_interference[idx].sum() if idx.size else 0.0
    r_c = t.wc * float(_log2_1p(t.bs_signal[ci] / (bs_int + t.noise_c)))
    if idx.size:
        mutual = t.d2d_to_d2d_cell[np.ix_(idx, idx)].sum(axis=0)
        interference = t.cell_to_d2d[ci, idx] + mutual
        r_d = t.wc * _log2_1p(t.d2d_cell_signal[idx] / (interference + t.noise_c))
        return r_c, tuple(r_d.tolist()), r_c + float(r_d.sum())
    return r_c, (), r_c


def mmwave_coalition_value(members, scenario: Scenario, params: SystemParams,
                           tables: LinkTables | None = None,
                           ) -> tuple[tuple[float, ...], float]:
    """Pre-outage member rates and the outage-weighted coalition value."""
    t = _as_tables(scenario, params, tables)
    idx = np.asarray(sorted(members), dtype=int)
    if idx.size == 0:
        return (), 0.0
    if idx.min() < 0 or idx.max() >= t.D:
        raise ValueError("D2D index out of range")
    interference = t.mm_interference[np.ix_(idx, idx)].sum(axis=0)
    r_d = t.wm * _log2_1p(t.mm_signal[idx] / (interference + t.noise_m))
    value = float(((1.0 - t.pout[idx]) * r_d).sum())
    return tuple(r_d.tolist()), value


def coalition_value(coalition_id: int, members, scenario: Scenario,
                    params: SystemParams,
                    tables: LinkTables | None = None) -> float:
    """Value R(F_c) of one coalition; cheapest entry point for the game."""
    t = _as_tables(scenario, params, tables)
    if coalition_id == t.C + 1:
        return mmwave_coalition_value(members, scenario, params, t)[1]
    return cellular_coalition_value(coalition_id, members, scenario, params, t)[2]


def system_sum_rate(partition: Partition, scenario: Scenario,
                    params: SystemParams,
                    tables: LinkTables | None = None) -> RateReport:
    """Full RateReport for one partition; sum of all coalition values."""
    t = _as_tables(scenario, params, tables)
    if partition.num_cellular != t.C or partition.num_d2d != t.D:
        raise ValueError("partition dimensions do not match scenario")
    groups = partition.coalitions()
    per_cell = []
    per_d2d = [0.0] * t.D
    per_value = []
    for c in range(1, t.C + 1):
        r_c, r_ds, value = cellular_coalition_value(
            c, groups[c], scenario, params, t)
        per_cell.append(r_c)
        per_value.append(value)
        for d, r in zip(sorted(groups[c]), r_ds):
            per_d2d[d] = r
    mm = groups[partition.mmwave_id]
    r_ds, value = mmwave_coalition_value(mm, scenario, params, t)
    per_value.append(value)
    for d, r in zip(sorted(mm), r_ds):
        per_d2d[d] = r
    return RateReport(tuple(per_cell), tuple(per_d2d), tuple(per_value),
                      float(math.fsum(per_value)))


def batch_sum_rate(assignments: np.ndarray, tables: LinkTables) -> np.ndarray:
    """System sum rates for a (B, D) batch of assignment vectors.

    Vectorized over the batch; used by the exhaustive oracle. Ids follow the
    Partition convention (1..C+1).
    """
    t = tables
    a = np.asarray(assignments, dtype=np.int64)
    if a.ndim != 2 or a.shape[1] != t.D:
        raise ValueError("assignments must be (B, D)")
    total = np.zeros(len(a))
    # mmWave coalition.
    mask_m = (a == t.C + 1).astype(float)
    i_m = mask_m @ t.mm_interference
    r_m = t.wm * _log2_1p(t.mm_signal / (i_m + t.noise_m))
    total += (mask_m * (1.0 - t.pout) * r_m).sum(axis=1)
    # Cellular coalitions.
    for c in range(1, t.C + 1):
        mask = (a == c).astype(float)
        i_bs = mask @ t.bs_interference
        total += t.wc * _log2_1p(t.bs_signal[c - 1] / (i_bs + t.noise_c))
        i_d = mask @ t.d2d_to_d2d_cell + t.cell_to_d2d[c - 1]
        r_d = t.wc * _log2_1p(t.d2d_cell_signal / (i_d + t.noise_c))
        total += (mask * r_d).sum(axis=1)
    return total
