"""Monte-Carlo sweep runner: paired scheme comparison over seeded trials."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .errors import BudgetExceededError, ConfigError, InvalidScenarioError
from .game import FormationConfig, form_coalitions, random_partition
from .params import SystemParams
from .rate import link_tables, system_sum_rate
from .scenario import generate_scenario

SCHEMES = ("CG", "FMC", "RC", "CCG", "FCC", "OS")
GAME_SCHEMES = ("CG", "CCG")

SWEEPABLE = (
    "num_cellular", "num_d2d", "mmwave_tx_power_dbm", "cell_tx_power_dbm",
    "blockage_beta", "halfpower_beamwidth_deg", "d2d_axis_offset_max",
    "side_length",
)

CSV_HEADER = "param_value,scheme,mean_rate_bps,std_rate_bps,trials,mean_switches"


@dataclass(frozen=True)
class SweepSpec:
    """One parameter sweep: which knob, which values, which schemes.

    ``swept_parameter`` may be a single field name or a tuple of names for
    coupled sweeps (then every value is a tuple of the same length, e.g.
    (side_length, d2d_axis_offset_max) pairs).
    """

    swept_parameter: str | tuple[str, ...]
    values: tuple
    base_params: SystemParams = field(default_factory=SystemParams)
    trials_per_point: int = 20
    schemes: tuple[str, ...] = ("CG", "FMC", "RC", "CCG", "FCC")
    seed: int = 0
    oracle_budget: int = baselines.DEFAULT_BUDGET
    name: str = "sweep"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(
            tuple(v) if isinstance(v, (list, tuple)) else v
            for v in self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if isinstance(self.swept_parameter, (list, tuple)):
            object.__setattr__(self, "swept_parameter",
                               tuple(self.swept_parameter))

    def validate(self) -> None:
        names = (self.swept_parameter if isinstance(self.swept_parameter, tuple)
                 else (self.swept_parameter,))
        for name in names:
            if name not in SWEEPABLE:
                raise ConfigError(f"cannot sweep parameter {name!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be >= 1")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}")
        if not self.schemes:
            raise ConfigError("sweep needs at least one scheme")
        self.base_params.validate()
        for v in self.values:
            self.params_at(v).validate()
        if "OS" in self.schemes:
            for v in self.values:
                p = self.params_at(v)
                required = (p.num_cellular + 1) ** p.num_d2d
                if required > self.oracle_budget:
                    raise BudgetExceededError(required, self.oracle_budget)

    def params_at(self, value) -> SystemParams:
        if isinstance(self.swept_parameter, tuple):
            changes = dict(zip(self.swept_parameter, value))
        else:
            changes = {self.swept_parameter: value}
        if "num_cellular" in changes:
            changes["num_cellular"] = int(changes["num_cellular"])
        if "num_d2d" in changes:
            changes["num_d2d"] = int(changes["num_d2d"])
        return self.base_params.replace(**changes)

    def to_config_dict(self) -> dict:
        return {
            "name": self.name,
            "swept_parameter": (list(self.swept_parameter)
                                if isinstance(self.swept_parameter, tuple)
                                else self.swept_parameter),
            "values": [list(v) if isinstance(v, tuple) else v
                       for v in self.values],
            "trials_per_point": self.trials_per_point,
            "schemes": list(self.schemes),
            "seed": self.seed,
            "oracle_budget": self.oracle_budget,
            "params": self.base_params.to_dict(),
        }

    @classmethod
    def from_config_dict(cls, doc: dict) -> "SweepSpec":
        known = {"name", "swept_parameter", "values", "trials_per_point",
                 "schemes", "seed", "oracle_budget", "params"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for required in ("swept_parameter", "values"):
            if required not in doc:
                raise ConfigError(f"config missing {required!r}")
        params = SystemParams.from_dict(doc.get("params", {}))
        kwargs = dict(
            swept_parameter=doc["swept_parameter"],
            values=doc["values"],
            base_params=params,
        )
        for key in ("name", "trials_per_point", "schemes", "seed",
                    "oracle_budget"):
            if key in doc:
                kwargs[key] = doc[key]
        spec = cls(**kwargs)
        spec.validate()
        return spec


@dataclass(frozen=True)
class PointStats:
    mean_rate: float
    std_rate: float
    trials: int
    mean_switches: float | None


@dataclass(frozen=True)
class SweepResult:
    """Aggregated sweep output plus the raw per-trial samples."""

    spec: SweepSpec
    stats: dict[tuple[int, str], PointStats]
    rate_samples: dict[tuple[int, str], tuple[float, ...]]
    switch_samples: dict[tuple[int, str], tuple[int, ...]]
    traces: dict[tuple[int, int, str], object] | None = None

    def csv_text(self) -> str:
        lines = [CSV_HEADER]
        for p, value in enumerate(self.spec.values):
            label = (";".join(repr(float(x)) for x in value)
                     if isinstance(value, tuple) else repr(float(value)))
            for scheme in self.spec.schemes:
                s = self.stats[(p, scheme)]
                switches = ("" if s.mean_switches is None
                            else repr(s.mean_switches))
                lines.append(f"{label},{scheme},{s.mean_rate!r},"
                             f"{s.std_rate!r},{s.trials},{switches}")
        return "\n".join(lines) + "\n"

    def meta_json(self) -> str:
        rows = []
        for p, value in enumerate(self.spec.values):
            for scheme in self.spec.schemes:
                s = self.stats[(p, scheme)]
                rows.append({
                    "param_value": list(value) if isinstance(value, tuple) else value,
                    "scheme": scheme,
                    "mean_rate_bps": s.mean_rate,
                    "std_rate_bps": s.std_rate,
                    "trials": s.trials,
                    "mean_switches": s.mean_switches,
                })
        return json.dumps({"spec": self.spec.to_config_dict(),
                           "results": rows}, indent=2, sort_keys=True)

    def means(self, scheme: str) -> list[float]:
        return [self.stats[(p, scheme)].mean_rate
                for p in range(len(self.spec.values))]


def _trial_seed(spec_seed: int, point: int, trial: int, stream: int) -> int:
    ss = np.random.SeedSequence(entropy=(spec_seed, point, trial, stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_trial(spec: SweepSpec, point: int, trial: int,
              keep_traces: bool = False):
    """One trial: fresh seeded scenario, every scheme on the same layout."""
    base = spec.params_at(spec.values[point])
    # Layouts with a cross link under the minimum distance are invalid and
    # rare; redraw deterministically instead of aborting the sweep.
    for retry in range(100):
        params = base.replace(
            rng_seed=_trial_seed(spec.seed, point, trial, 100 * retry))
        scenario = generate_scenario(params)
        try:
            tables = link_tables(scenario, params)
            break
        except InvalidScenarioError:
            continue
    else:
        raise InvalidScenarioError(
            f"no valid layout after 100 redraws at point {point}, trial {trial}")
    rates: dict[str, float] = {}
    switches: dict[str, int] = {}
    traces: dict[str, object] = {}
    for scheme in spec.schemes:
        if scheme == "CG":
            initial = random_partition(
                params.num_cellular, params.num_d2d,
                _trial_seed(spec.seed, point, trial, 1))
            config = FormationConfig(
                rng_seed=_trial_seed(spec.seed, point, trial, 2))
            trace = form_coalitions(scenario, params, initial, config,
                                    tables=tables)
            partition = trace.final_partition
            switches[scheme] = trace.total_switch_count
            traces[scheme] = trace
        elif scheme == "CCG":
            config = FormationConfig(
                rng_seed=_trial_seed(spec.seed, point, trial, 3))
            trace = baselines.ccg_partition(scenario, params, config,
                                            tables=tables)
            partition = trace.final_partition
            switches[scheme] = trace.total_switch_count
            traces[scheme] = trace
        elif scheme == "FMC":
            partition = baselines.fmc_partition(scenario, params)
        elif scheme == "RC":
            partition = baselines.rc_partition(
                scenario, params, _trial_seed(spec.seed, point, trial, 4))
        elif scheme == "FCC":
            partition = baselines.fcc_partition(
                scenario, params, _trial_seed(spec.seed, point, trial, 5))
        elif scheme == "OS":
            partition, _ = baselines.exhaustive_optimal(
                scenario, params, budget=spec.oracle_budget, tables=tables)
        else:  # pragma: no cover - guarded by validate()
            raise ConfigError(f"unknown scheme {scheme!r}")
        rates[scheme] = system_sum_rate(partition, scenario, params,
                                        tables).system_sum_rate
    return rates, switches, (traces if keep_traces else None)


def run_sweep(spec: SweepSpec, threads: int = 1,
              keep_traces: bool = False) -> SweepResult:
    """Run every (point, trial) cell; deterministic for any thread count."""
    spec.validate()
    cells = [(p, t) for p in range(len(spec.values))
             for t in range(spec.trials_per_point)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(
                lambda cell: run_trial(spec, cell[0], cell[1], keep_traces),
                cells))
    else:
        outputs = [run_trial(spec, p, t, keep_traces) for p, t in cells]

    rate_samples: dict[tuple[int, str], list[float]] = {}
    switch_samples: dict[tuple[int, str], list[int]] = {}
    all_traces: dict[tuple[int, int, str], object] = {}
    for (p, t), (rates, switches, traces) in zip(cells, outputs):
        for scheme, r in rates.items():
            rate_samples.setdefault((p, scheme), []).append(r)
        for scheme, n in switches.items():
            switch_samples.setdefault((p, scheme), []).append(n)
        if traces:
            for scheme, trace in traces.items():
                all_traces[(p, t, scheme)] = trace

    stats: dict[tuple[int, str], PointStats] = {}
    for p in range(len(spec.values)):
        for scheme in spec.schemes:
            samples = rate_samples[(p, scheme)]
            mean = float(np.mean(samples))
            std = float(np.std(samples, ddof=1)) if len(samples) > 1 else 0.0
            sw = switch_samples.get((p, scheme))
            stats[(p, scheme)] = PointStats(
                mean, std, len(samples),
                float(np.mean(sw)) if sw is not None else None)
    return SweepResult(
        spec, stats,
        {k: tuple(v) for k, v in rate_samples.items()},
        {k: tuple(v) for k, v in switch_samples.items()},
        all_traces if keep_traces else None)


def average_deviation(os_values, cg_values) -> float:
    """Mean relative shortfall of the game vs the exhaustive optimum."""
    os_values = list(os_values)
    cg_values = list(cg_values)
    if len(os_values) != len(cg_values) or not os_values:
        raise ValueError("inputs must be equal nonzero lengths")
    if any(v <= 0 for v in os_values):
        raise ValueError("optimum values must be > 0")
    return float(np.mean([(o - c) / o for o, c in zip(os_values, cg_values)]))


def convergence_stats(traces) -> tuple[float, float, int]:
    """(mean, std, max) of total switch counts over formation traces."""
    counts = [t.total_switch_count for t in traces]
    if not counts:
        raise ValueError("no traces given")
    std = float(np.std(counts, ddof=1)) if len(counts) > 1 else 0.0
    return float(np.mean(counts)), std, max(counts)
