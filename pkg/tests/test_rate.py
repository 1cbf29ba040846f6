import math

import numpy as np
import pytest

from hcnsim import (
    InvalidScenarioError,
    Partition,
    RateReport,
    SystemParams,
    batch_sum_rate,
    blockage_probability,
    cellular_coalition_value,
    cellular_rx_power,
    generate_scenario,
    link_tables,
    mmwave_coalition_value,
    mmwave_rx_power,
    system_sum_rate,
)
from hcnsim.channel import cellular_noise_power, dbm_to_watts, mmwave_noise_power
from hcnsim.game import random_partition
from hcnsim.rate import coalition_value
from hcnsim.scenario import distance


def _gain(scenario, key, *idx):
    if scenario.channel_gains is None:
        return 1.0
    return float(scenario.channel_gains[key][idx])


def oracle_report(partition, scenario, params):
    """Straight-line per-link recomputation of every rate in a partition.

    Deliberately scalar and loop-based: built only from the channel-level
    primitives, with no shared code with the vectorized table path.
    """
    p_c = dbm_to_watts(params.cell_tx_power_dbm)
    g0, gb = params.device_gain_dbi, params.bs_gain_dbi
    n_c = cellular_noise_power(params)
    n_m = mmwave_noise_power(params)
    wc, wm = params.cell_bandwidth_hz, params.mmwave_bandwidth_hz
    bs = tuple(scenario.bs_position)

    per_cell, per_d2d, per_value = [], [0.0] * scenario.num_d2d, []
    groups = partition.coalitions()
    for c in range(1, scenario.num_cellular + 1):
        members = groups[c]
        cell_pos = tuple(scenario.cellular_positions[c - 1])
        bs_interference = sum(
            cellular_rx_power(
                p_c, g0, gb, distance(tuple(scenario.d2d_tx_positions[d]), bs),
                params, _gain(scenario, "d2d_bs", d))
            for d in members)
        s_cb = cellular_rx_power(p_c, g0, gb, distance(cell_pos, bs), params,
                                 _gain(scenario, "cell_bs", c - 1))
        r_c = wc * math.log2(1.0 + s_cb / (bs_interference + n_c))
        value = r_c
        for d in members:
            rx = tuple(scenario.d2d_rx_positions[d])
            signal = cellular_rx_power(
                p_c, g0, g0,
                distance(tuple(scenario.d2d_tx_positions[d]), rx),
                params, _gain(scenario, "d2d_d2d", d, d))
            interference = cellular_rx_power(
                p_c, g0, g0, distance(cell_pos, rx), params,
                _gain(scenario, "cell_d2d", c - 1, d))
            for j in members:
                if j != d:
                    interference += cellular_rx_power(
                        p_c, g0, g0,
                        distance(tuple(scenario.d2d_tx_positions[j]), rx),
                        params, _gain(scenario, "d2d_d2d", j, d))
            r_d = wc * math.log2(1.0 + signal / (interference + n_c))
            per_d2d[d] = r_d
            value += r_d
        per_cell.append(r_c)
        per_value.append(value)

    mm = groups[partition.mmwave_id]
    value = 0.0
    for d in mm:
        signal = mmwave_rx_power(d, d, scenario, params)
        interference = sum(mmwave_rx_power(d, j, scenario, params)
                           for j in mm if j != d)
        r_d = wm * math.log2(1.0 + signal / (interference + n_m))
        per_d2d[d] = r_d
        link = distance(tuple(scenario.d2d_tx_positions[d]),
                        tuple(scenario.d2d_rx_positions[d]))
        value += (1.0 - blockage_probability(link, params.blockage_beta)) * r_d
    per_value.append(value)
    return RateReport(tuple(per_cell), tuple(per_d2d), tuple(per_value),
                      math.fsum(per_value))


class TestPartition:
    def test_validation(self):
        with pytest.raises(ValueError):
            Partition(2, (0,))
        with pytest.raises(ValueError):
            Partition(2, (4,))

    def test_members_and_coalitions(self):
        p = Partition(2, (1, 3, 1, 2))
        assert p.mmwave_id == 3
        assert p.members(1) == (0, 2)
        assert p.coalitions() == {1: (0, 2), 2: (3,), 3: (1,)}
        assert p.num_d2d == 4

    def test_empty(self):
        p = Partition(3, ())
        assert p.coalitions() == {1: (), 2: (), 3: (), 4: ()}


class TestRateReportJson:
    def test_round_trip(self):
        r = RateReport((1.0, 2.0), (3.0,), (1.0, 2.0, 3.0), 6.0)
        assert RateReport.from_json(r.to_json()) == r


def _random_case(seed, C=4, D=8, **overrides):
    params = SystemParams(num_cellular=C, num_d2d=D, rng_seed=seed,
                          **overrides)
    scenario = generate_scenario(params)
    partition = random_partition(C, D, seed + 1000)
    return params, scenario, partition


class TestAgainstOracle:
    @pytest.mark.parametrize("seed", range(6))
    def test_average_mode(self, seed):
        params, scenario, partition = _random_case(seed)
        got = system_sum_rate(partition, scenario, params)
        want = oracle_report(partition, scenario, params)
        np.testing.assert_allclose(got.per_cellular_rate,
                                   want.per_cellular_rate, rtol=1e-9)
        np.testing.assert_allclose(got.per_d2d_rate, want.per_d2d_rate,
                                   rtol=1e-9)
        np.testing.assert_allclose(got.per_coalition_value,
                                   want.per_coalition_value, rtol=1e-9)
        assert got.system_sum_rate == pytest.approx(want.system_sum_rate,
                                                    rel=1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_rayleigh_mode(self, seed):
        params, scenario, partition = _random_case(
            seed + 50, fading_mode="rayleigh")
        got = system_sum_rate(partition, scenario, params)
        want = oracle_report(partition, scenario, params)
        assert got.system_sum_rate == pytest.approx(want.system_sum_rate,
                                                    rel=1e-9)
        np.testing.assert_allclose(got.per_d2d_rate, want.per_d2d_rate,
                                   rtol=1e-9)

    def test_off_default_knobs(self):
        params, scenario, partition = _random_case(
            7, mui_factor=0.3, blockage_beta=0.08, pathloss_exponent=2.7,
            halfpower_beamwidth_deg=45.0)
        got = system_sum_rate(partition, scenario, params)
        want = oracle_report(partition, scenario, params)
        assert got.system_sum_rate == pytest.approx(want.system_sum_rate,
                                                    rel=1e-9)


class TestIdentities:
    def test_sum_of_coalition_values(self):
        params, scenario, partition = _random_case(11)
        tables = link_tables(scenario, params)
        total = math.fsum(
            coalition_value(c, partition.members(c), scenario, params, tables)
            for c in range(1, partition.mmwave_id + 1))
        report = system_sum_rate(partition, scenario, params, tables)
        assert total == pytest.approx(report.system_sum_rate, rel=1e-9)

    def test_batch_matches_report(self):
        params, scenario, _ = _random_case(13)
        tables = link_tables(scenario, params)
        parts = [random_partition(4, 8, s) for s in range(30)]
        batch = batch_sum_rate(
            np.array([p.assignment for p in parts]), tables)
        for p, b in zip(parts, batch):
            r = system_sum_rate(p, scenario, params, tables).system_sum_rate
            assert float(b) == pytest.approx(r, rel=1e-9)

    def test_batch_shape_checked(self):
        params, scenario, _ = _random_case(13)
        tables = link_tables(scenario, params)
        with pytest.raises(ValueError):
            batch_sum_rate(np.ones((2, 3), dtype=int), tables)


class TestCoalitionValues:
    def test_empty_mmwave(self):
        params, scenario, _ = _random_case(17)
        assert mmwave_coalition_value((), scenario, params) == ((), 0.0)

    def test_empty_cellular_is_solo_rate(self):
        params, scenario, _ = _random_case(17)
        r_c, rates, value = cellular_coalition_value(1, (), scenario, params)
        assert rates == () and value == r_c and r_c > 0.0

    def test_joining_pair_lowers_cellular_user_rate(self):
        params, scenario, _ = _random_case(19)
        solo, _, _ = cellular_coalition_value(1, (), scenario, params)
        shared, _, _ = cellular_coalition_value(1, (0,), scenario, params)
        assert shared < solo

    def test_mmwave_interference_subadditive(self):
        params, scenario, _ = _random_case(23)
        singles = sum(mmwave_coalition_value((d,), scenario, params)[1]
                      for d in range(params.num_d2d))
        joint = mmwave_coalition_value(tuple(range(params.num_d2d)),
                                       scenario, params)[1]
        assert joint <= singles + 1e-6

    def test_zero_blockage_value_is_rate_sum(self):
        params, scenario, _ = _random_case(29, blockage_beta=0.0)
        rates, value = mmwave_coalition_value((0, 1, 2), scenario, params)
        assert value == pytest.approx(math.fsum(rates), rel=1e-12)

    def test_mmwave_rate_dwarfs_cellular_rate(self):
        # Singleton comparison: the wide mmWave band should win by >= 1e4.
        params, scenario, _ = _random_case(31)
        mm = mmwave_coalition_value((0,), scenario, params)[0][0]
        cell = cellular_coalition_value(1, (0,), scenario, params)[1][0]
        assert mm / cell >= 1e4

    def test_index_validation(self):
        params, scenario, _ = _random_case(37)
        with pytest.raises(ValueError):
            cellular_coalition_value(0, (), scenario, params)
        with pytest.raises(ValueError):
            cellular_coalition_value(1, (99,), scenario, params)
        with pytest.raises(ValueError):
            mmwave_coalition_value((-1,), scenario, params)


class TestLinkTables:
    def test_dimension_mismatch(self):
        params, scenario, _ = _random_case(41)
        with pytest.raises(InvalidScenarioError):
            link_tables(scenario, params.replace(num_d2d=5))

    def test_rayleigh_requires_gains(self):
        params, scenario, _ = _random_case(43)
        with pytest.raises(InvalidScenarioError):
            link_tables(scenario, params.replace(fading_mode="rayleigh"))

    def test_partition_mismatch(self):
        params, scenario, _ = _random_case(47)
        with pytest.raises(ValueError):
            system_sum_rate(Partition(4, (1,)), scenario, params)
