"""Comparison schemes and the exhaustive-search optimum."""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceededError, ConfigError
from .game import FormationConfig, SwitchTrace, form_coalitions, random_partition
from .params import SystemParams
from .rate import LinkTables, Partition, batch_sum_rate, link_tables
from .scenario import Scenario

DEFAULT_BUDGET = 10 ** 8
_BATCH = 1 << 16


def fmc_partition(scenario: Scenario, params: SystemParams) -> Partition:
    """Full mmWave: every pair in the mmWave coalition."""
    C, D = scenario.num_cellular, scenario.num_d2d
    return Partition(C, (C + 1,) * D)


def rc_partition(scenario: Scenario, params: SystemParams, seed) -> Partition:
    """Random: each pair i.i.d. uniform over all C+1 coalitions."""
    return random_partition(scenario.num_cellular, scenario.num_d2d, seed)


def fcc_partition(scenario: Scenario, params: SystemParams, seed) -> Partition:
    """Full cellular: each pair i.i.d. uniform over the C cellular coalitions."""
    C = scenario.num_cellular
    if C < 1:
        raise ConfigError("full-cellular scheme needs at least one cellular user")
    return random_partition(C, scenario.num_d2d, seed,
                            coalition_ids=range(1, C + 1))


def ccg_partition(scenario: Scenario, params: SystemParams,
                  config: FormationConfig,
                  tables: LinkTables | None = None) -> SwitchTrace:
    """Coalition game restricted to the cellular coalitions only."""
    C, D = scenario.num_cellular, scenario.num_d2d
    if C < 1:
        raise ConfigError("cellular coalition game needs at least one cellular user")
    ids = list(range(1, C + 1))
    initial = random_partition(C, D, config.rng_seed, coalition_ids=ids)
    return form_coalitions(scenario, params, initial, config,
                           coalition_ids=ids, tables=tables)


def exhaustive_optimal(scenario: Scenario, params: SystemParams,
                       budget: int = DEFAULT_BUDGET,
                       tables: LinkTables | None = None,
                       ) -> tuple[Partition, float]:
    """Enumerate every assignment and return an argmax of the sum rate.

    Ties break to the lexicographically smallest assignment vector (the
    enumeration is in lexicographic order and only strict improvements are
    kept). Refuses upfront when (C+1)^D exceeds ``budget``.
    """
    if tables is None:
        tables = link_tables(scenario, params)
    C, D = tables.C, tables.D
    base = C + 1
    count = base ** D
    if count > budget:
        raise BudgetExceededError(required=count, budget=budget)
    if D == 0:
        p = Partition(C, ())
        return p, float(batch_sum_rate(np.zeros((1, 0), dtype=int), tables)[0])

    weights = base ** np.arange(D - 1, -1, -1, dtype=np.int64)
    best_value = -np.inf
    best_assignment = None
    for start in range(0, count, _BATCH):
        idx = np.arange(start, min(start + _BATCH, count), dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % base
        rates = batch_sum_rate(digits + 1, tables)
        k = int(np.argmax(rates))
        if rates[k] > best_value:
            best_value = float(rates[k])
            best_assignment = tuple(int(x) for x in digits[k] + 1)
    return Partition(C, best_assignment), best_value
