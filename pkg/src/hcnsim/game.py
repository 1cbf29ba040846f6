"""Coalition-formation engine: switch operations, formation loop, stability."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .params import SystemParams
from .rate import LinkTables, Partition, coalition_value, link_tables
from .scenario import Scenario


class OrderPolicy(str, enum.Enum):
    FIXED_ROUND_ROBIN = "round_robin"
    RANDOM_PERMUTATION_PER_PASS = "random_permutation"


@dataclass(frozen=True)
class FormationConfig:
    """Knobs of the formation loop.

    The loop stops after ``stop_factor * D`` consecutive unsuccessful switch
    evaluations, or at ``max_iterations_cap`` as a livelock guard (None picks
    a generous default).
    """

    order_policy: OrderPolicy = OrderPolicy.RANDOM_PERMUTATION_PER_PASS
    stop_factor: int = 10
    max_iterations_cap: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "order_policy", OrderPolicy(self.order_policy))
        if self.stop_factor < 1:
            raise ValueError("stop_factor must be >= 1")

    def cap_for(self, num_d2d: int) -> int:
        if self.max_iterations_cap is not None:
            cap = self.max_iterations_cap
            if cap < self.stop_factor * num_d2d:
                raise ValueError("cap must be >= stop_factor * D")
            return cap
        return max(10_000, 200 * self.stop_factor * max(num_d2d, 1))


@dataclass(frozen=True)
class SwitchRecord:
    iteration: int
    pair: int
    from_coalition: int
    to_coalition: int
    gain: float


@dataclass(frozen=True)
class SwitchTrace:
    """Record of one formation run."""

    records: tuple[SwitchRecord, ...]
    final_partition: Partition
    converged: bool  # True: stopped via the unsuccessful-streak rule
    iterations: int
    evaluations: int  # coalition-value computations in the main loop
    stability_scan_evaluations: int = 0  # extra work confirming stability

    @property
    def total_switch_count(self) -> int:
        return len(self.records)

    def to_json(self) -> str:
        return json.dumps({
            "switches": [
                [r.iteration, r.pair, r.from_coalition, r.to_coalition, r.gain]
                for r in self.records
            ],
            "final_assignment": list(self.final_partition.assignment),
            "num_cellular": self.final_partition.num_cellular,
            "converged": self.converged,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "stability_scan_evaluations": self.stability_scan_evaluations,
        }, indent=2, sort_keys=True)


def random_partition(num_cellular: int, num_d2d: int, seed,
                     coalition_ids=None) -> Partition:
    """Each pair assigned i.i.d. uniform over ``coalition_ids`` (default all)."""
    ids = list(coalition_ids) if coalition_ids is not None \
        else list(range(1, num_cellular + 2))
    if not ids:
        raise ValueError("no coalition ids to draw from")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(ids), size=num_d2d)
    return Partition(num_cellular, tuple(ids[p] for p in picks))


def apply_switch(partition: Partition, d: int, target: int) -> Partition:
    """New partition with pair d moved to ``target``; input left unchanged."""
    if not 0 <= d < partition.num_d2d:
        raise ValueError(f"pair index {d} out of range")
    if not 1 <= target <= partition.mmwave_id:
        raise ValueError(f"coalition id {target} out of range")
    if partition.assignment[d] == target:
        raise ValueError("target equals the current coalition")
    assignment = list(partition.assignment)
    assignment[d] = target
    return Partition(partition.num_cellular, tuple(assignment))


def switch_gain(partition: Partition, d: int, target: int,
                scenario: Scenario, params: SystemParams,
                tables: LinkTables | None = None) -> float:
    """Total-utility change if pair d moved to ``target``.

    Only the two affected coalitions are re-evaluated; the result is positive
    exactly when the utilitarian preference favors the switch.
    """
    if tables is None:
        tables = link_tables(scenario, params)
    if partition.assignment[d] == target:
        raise ValueError("target equals the current coalition")
    current = partition.assignment[d]
    cur_members = set(partition.members(current))
    tgt_members = set(partition.members(target))
    before = (coalition_value(current, cur_members, scenario, params, tables)
              + coalition_value(target, tgt_members, scenario, params, tables))
    after = (coalition_value(current, cur_members - {d}, scenario, params, tables)
             + coalition_value(target, tgt_members | {d}, scenario, params, tables))
    return after - before


def form_coalitions(scenario: Scenario, params: SystemParams,
                    initial: Partition, config: FormationConfig,
                    coalition_ids=None,
                    tables: LinkTables | None = None) -> SwitchTrace:
    """Run the formation loop from ``initial`` until the streak rule fires.

    Pairs are visited per the order policy; each visit draws one other
    coalition uniformly from ``coalition_ids`` (default: all C+1) and
    switches iff the utilitarian gain is strictly positive. When the
    unsuccessful streak reaches ``stop_factor * D``, the loop confirms Nash
    stability by an exhaustive scan; any improving move it finds is taken
    and the loop continues, so a converged trace is always a fixed point.
    Deterministic given the seeds in ``config``.
    """
    if tables is None:
        tables = link_tables(scenario, params)
    C, D = tables.C, tables.D
    ids = list(coalition_ids) if coalition_ids is not None \
        else list(range(1, C + 2))
    if initial.num_cellular != C or initial.num_d2d != D:
        raise ValueError("initial partition does not match scenario")
    for a in initial.assignment:
        if a not in ids:
            raise ValueError(f"initial assignment uses disallowed coalition {a}")

    if D == 0 or len(ids) < 2:
        return SwitchTrace((), initial, True, 0, 0)

    rng = np.random.default_rng(config.rng_seed)
    cap = config.cap_for(D)
    threshold = config.stop_factor * D

    assignment = list(initial.assignment)
    members: dict[int, set[int]] = {c: set() for c in ids}
    for d, a in enumerate(assignment):
        members[a].add(d)
    values = {c: coalition_value(c, members[c], scenario, params, tables)
              for c in ids}
    evaluations = len(ids)

    records: list[SwitchRecord] = []
    num = 0
    iteration = 0
    converged = False
    scan_evaluations = 0
    order: list[int] = []

    def find_improving_move():
        # Exhaustive scan of all (pair, target) moves; None when stable.
        nonlocal scan_evaluations
        for d in range(D):
            current = assignment[d]
            leave = coalition_value(current, members[current] - {d},
                                    scenario, params, tables)
            scan_evaluations += 1
            for target in ids:
                if target == current:
                    continue
                join = coalition_value(target, members[target] | {d},
                                       scenario, params, tables)
                scan_evaluations += 1
                gain = (leave + join) - (values[current] + values[target])
                if gain > 0.0:
                    return d, target, leave, join, gain
        return None

    while iteration < cap:
        if not order:
            order = list(range(D))
            if config.order_policy is OrderPolicy.RANDOM_PERMUTATION_PER_PASS:
                order = [int(i) for i in rng.permutation(D)]
        d = order.pop(0)
        current = assignment[d]
        others = [c for c in ids if c != current]
        target = others[int(rng.integers(0, len(others)))]
        new_cur = coalition_value(current, members[current] - {d},
                                  scenario, params, tables)
        new_tgt = coalition_value(target, members[target] | {d},
                                  scenario, params, tables)
        evaluations += 2
        gain = (new_cur + new_tgt) - (values[current] + values[target])
        iteration += 1
        if gain > 0.0:
            members[current].discard(d)
            members[target].add(d)
            assignment[d] = target
            values[current] = new_cur
            values[target] = new_tgt
            records.append(SwitchRecord(iteration, d, current, target, gain))
            num = 0
        else:
            num += 1
            if num >= threshold:
                move = find_improving_move()
                if move is None:
                    converged = True
                    break
                d, target, leave, join, gain = move
                current = assignment[d]
                members[current].discard(d)
                members[target].add(d)
                assignment[d] = target
                values[current] = leave
                values[target] = join
                records.append(SwitchRecord(iteration, d, current, target, gain))
                num = 0

    final = Partition(C, tuple(assignment))
    return SwitchTrace(tuple(records), final, converged, iteration,
                       evaluations, scan_evaluations)


def is_nash_stable(partition: Partition, scenario: Scenario,
                   params: SystemParams,
                   tables: LinkTables | None = None,
                   coalition_ids=None) -> tuple[bool, tuple[int, int] | None]:
    """Exhaustively check that no pair has a strictly improving switch.

    Returns (True, None) when stable, else (False, (pair, target)) for one
    violating move.
    """
    if tables is None:
        tables = link_tables(scenario, params)
    ids = list(coalition_ids) if coalition_ids is not None \
        else list(range(1, tables.C + 2))
    members = {c: set() for c in ids}
    for d, a in enumerate(partition.assignment):
        members[a].add(d)
    values = {c: coalition_value(c, members[c], scenario, params, tables)
              for c in ids}
    for d in range(partition.num_d2d):
        current = partition.assignment[d]
        leave = coalition_value(current, members[current] - {d},
                                scenario, params, tables)
        for target in ids:
            if target == current:
                continue
            join = coalition_value(target, members[target] | {d},
                                   scenario, params, tables)
            if (leave + join) - (values[current] + values[target]) > 0.0:
                return False, (d, target)
    return True, None
