import numpy as np
import pytest
from scipy import stats

from hcnsim import (
    BudgetExceededError,
    ConfigError,
    FormationConfig,
    SystemParams,
    batch_sum_rate,
    ccg_partition,
    exhaustive_optimal,
    fcc_partition,
    fmc_partition,
    generate_scenario,
    is_nash_stable,
    link_tables,
    random_partition,
    rc_partition,
    system_sum_rate,
)


def _case(seed, C=3, D=6):
    params = SystemParams(num_cellular=C, num_d2d=D, rng_seed=seed)
    scenario = generate_scenario(params)
    return params, scenario, link_tables(scenario, params)


class TestFixedSchemes:
    def test_fmc_all_mmwave(self):
        params, scenario, _ = _case(0, C=4, D=9)
        p = fmc_partition(scenario, params)
        assert p.assignment == (5,) * 9

    def test_rc_range_and_determinism(self):
        params, scenario, _ = _case(1, C=4, D=50)
        p = rc_partition(scenario, params, seed=7)
        assert all(1 <= a <= 5 for a in p.assignment)
        assert p == rc_partition(scenario, params, seed=7)

    def test_fcc_avoids_mmwave(self):
        params, scenario, _ = _case(2, C=4, D=50)
        p = fcc_partition(scenario, params, seed=3)
        assert all(1 <= a <= 4 for a in p.assignment)

    def test_fcc_needs_cellular_user(self):
        params = SystemParams(num_cellular=0, num_d2d=3)
        scenario = generate_scenario(params)
        with pytest.raises(ConfigError):
            fcc_partition(scenario, params, seed=0)

    def test_rc_uniformity(self):
        # Chi-square on ~1e5 draws across the C+1 coalitions.
        params = SystemParams(num_cellular=4, num_d2d=100_000, rng_seed=5)
        p = random_partition(params.num_cellular, params.num_d2d, seed=11)
        counts = np.bincount(p.assignment, minlength=6)[1:]
        assert counts.sum() == 100_000
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_fcc_uniformity(self):
        counts = np.bincount(
            random_partition(4, 100_000, seed=13,
                             coalition_ids=range(1, 5)).assignment,
            minlength=5)[1:]
        assert counts.sum() == 100_000
        assert stats.chisquare(counts).pvalue > 1e-3


class TestCcg:
    def test_stays_cellular_and_stable_in_restriction(self):
        params, scenario, tables = _case(4, C=4, D=10)
        trace = ccg_partition(scenario, params, FormationConfig(rng_seed=2),
                              tables=tables)
        assert trace.converged
        assert all(1 <= a <= 4 for a in trace.final_partition.assignment)
        ids = [1, 2, 3, 4]
        assert is_nash_stable(trace.final_partition, scenario, params,
                              tables=tables, coalition_ids=ids)[0]

    def test_matches_restricted_exhaustive_small(self):
        # With one cellular user the restricted game has a single partition.
        params, scenario, tables = _case(5, C=1, D=4)
        trace = ccg_partition(scenario, params, FormationConfig(rng_seed=1),
                              tables=tables)
        assert trace.final_partition.assignment == (1, 1, 1, 1)

    def test_needs_cellular_user(self):
        params = SystemParams(num_cellular=0, num_d2d=3)
        scenario = generate_scenario(params)
        with pytest.raises(ConfigError):
            ccg_partition(scenario, params, FormationConfig(rng_seed=0))


class TestExhaustive:
    def test_budget_refusal_is_upfront(self):
        params, scenario, tables = _case(6, C=3, D=6)
        with pytest.raises(BudgetExceededError) as exc:
            exhaustive_optimal(scenario, params, budget=100, tables=tables)
        assert exc.value.required == 4 ** 6
        assert exc.value.budget == 100

    def test_dominates_everything(self):
        params, scenario, tables = _case(7, C=2, D=6)
        best, value = exhaustive_optimal(scenario, params, tables=tables)
        assignments = np.array(
            [random_partition(2, 6, s).assignment for s in range(200)])
        rates = batch_sum_rate(assignments, tables)
        assert value >= rates.max() - 1e-9
        report = system_sum_rate(best, scenario, params, tables)
        assert report.system_sum_rate == pytest.approx(value, rel=1e-9)

    def test_matches_bruteforce_python(self):
        # Tiny instance cross-check against a per-partition evaluation loop.
        from itertools import product

        params, scenario, tables = _case(8, C=2, D=3)
        best, value = exhaustive_optimal(scenario, params, tables=tables)
        expected = max(
            system_sum_rate(
                __import__("hcnsim").Partition(2, a), scenario, params,
                tables).system_sum_rate
            for a in product((1, 2, 3), repeat=3))
        assert value == pytest.approx(expected, rel=1e-9)

    def test_lexicographic_tie_break(self):
        # D = 0 has exactly one (empty) assignment.
        params = SystemParams(num_cellular=2, num_d2d=0, rng_seed=1)
        scenario = generate_scenario(params)
        best, value = exhaustive_optimal(scenario, params)
        assert best.assignment == ()
        assert value > 0.0

    def test_optimum_is_nash_stable(self):
        params, scenario, tables = _case(9, C=2, D=5)
        best, _ = exhaustive_optimal(scenario, params, tables=tables)
        assert is_nash_stable(best, scenario, params, tables=tables)[0]
