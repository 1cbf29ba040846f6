"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import baselines
from .errors import BudgetExceededError, ConfigError, InvalidScenarioError
from .game import FormationConfig, form_coalitions, is_nash_stable, random_partition
from .harness import SweepSpec, run_sweep
from .params import SystemParams
from .rate import batch_sum_rate, link_tables, system_sum_rate
from .scenario import generate_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_REFUSED = 2


def _params_from_args(args) -> SystemParams:
    overrides = {
        "num_cellular": args.cellular,
        "num_d2d": args.d2d,
        "rng_seed": args.seed,
    }
    for attr, name in (("side_length", "side_length"),
                       ("beamwidth", "halfpower_beamwidth_deg"),
                       ("beta", "blockage_beta"),
                       ("offset", "d2d_axis_offset_max"),
                       ("fading", "fading_mode")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[name] = value
    params = SystemParams().replace(**overrides)
    params.validate()
    return params


def _print_report(report, label: str) -> None:
    print(f"[{label}] system sum rate: {report.system_sum_rate!r} bit/s")
    for i, v in enumerate(report.per_coalition_value, start=1):
        kind = "mmWave" if i == len(report.per_coalition_value) else f"cell {i}"
        print(f"  coalition {i} ({kind}): {v!r}")


def cmd_run(args) -> int:
    params = _params_from_args(args)
    scenario = generate_scenario(params)
    tables = link_tables(scenario, params)
    scheme = args.scheme.upper()
    trace = None
    if scheme == "CG":
        initial = random_partition(params.num_cellular, params.num_d2d,
                                   args.seed)
        trace = form_coalitions(scenario, params, initial,
                                FormationConfig(rng_seed=args.seed),
                                tables=tables)
        partition = trace.final_partition
    elif scheme == "CCG":
        trace = baselines.ccg_partition(
            scenario, params, FormationConfig(rng_seed=args.seed),
            tables=tables)
        partition = trace.final_partition
    elif scheme == "FMC":
        partition = baselines.fmc_partition(scenario, params)
    elif scheme == "RC":
        partition = baselines.rc_partition(scenario, params, args.seed)
    elif scheme == "FCC":
        partition = baselines.fcc_partition(scenario, params, args.seed)
    elif scheme == "OS":
        partition, _ = baselines.exhaustive_optimal(
            scenario, params, budget=args.budget, tables=tables)
    else:
        raise ConfigError(f"unknown scheme {args.scheme!r}")
    report = system_sum_rate(partition, scenario, params, tables)
    print(f"assignment: {list(partition.assignment)}")
    _print_report(report, scheme)
    if trace is not None:
        print(f"switch operations: {trace.total_switch_count}"
              f" (iterations: {trace.iterations},"
              f" converged: {trace.converged})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    spec = SweepSpec.from_config_dict(doc)
    result = run_sweep(spec, threads=args.threads, keep_traces=args.traces)
    out = Path(args.out) / spec.name
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(result.csv_text())
    (out / "meta.json").write_text(result.meta_json())
    if not args.no_plot:
        from . import report as report_mod
        report_mod.plot_sweep_rates(result, out / "rates.png")
        report_mod.plot_sweep_switches(result, out / "switches.png")
    if args.traces and result.traces:
        traces_dir = out / "traces"
        traces_dir.mkdir(exist_ok=True)
        for (p, t, scheme), trace in sorted(result.traces.items()):
            name = f"point{p:03d}_trial{t:03d}_{scheme}.json"
            (traces_dir / name).write_text(trace.to_json())
    print(f"wrote {out / 'results.csv'}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _params_from_args(args)
    scenario = generate_scenario(params)
    partition, value = baselines.exhaustive_optimal(
        scenario, params, budget=args.budget)
    report = system_sum_rate(partition, scenario, params)
    print(f"optimal assignment: {list(partition.assignment)}")
    _print_report(report, "OS")
    return EXIT_OK


def cmd_validate(args) -> int:
    rng = np.random.default_rng(args.seed)
    bad: dict[str, list[int]] = {
        "convergence via streak rule": [],
        "Nash stability of final partition": [],
        "strictly positive switch gains": [],
        "batch/report evaluator agreement": [],
    }
    for k in range(args.instances):
        C = int(rng.integers(1, 6))
        D = int(rng.integers(2, 11))
        seed = int(rng.integers(0, 2 ** 31))
        params = SystemParams(num_cellular=C, num_d2d=D, rng_seed=seed)
        scenario = generate_scenario(params)
        tables = link_tables(scenario, params)

        initial = random_partition(C, D, seed)
        trace = form_coalitions(scenario, params, initial,
                                FormationConfig(rng_seed=seed), tables=tables)
        if not trace.converged:
            bad["convergence via streak rule"].append(k)
        stable, _ = is_nash_stable(trace.final_partition, scenario, params,
                                   tables=tables)
        if not stable:
            bad["Nash stability of final partition"].append(k)
        if any(r.gain <= 0 for r in trace.records):
            bad["strictly positive switch gains"].append(k)

        partition = random_partition(C, D, seed + 1)
        report = system_sum_rate(partition, scenario, params, tables)
        batch = float(batch_sum_rate(
            np.asarray([partition.assignment]), tables)[0])
        if abs(batch - report.system_sum_rate) > 1e-9 * report.system_sum_rate:
            bad["batch/report evaluator agreement"].append(k)
    ok = True
    for check, instances in bad.items():
        if instances:
            ok = False
            print(f"FAIL: {check} (instances {instances})")
        else:
            print(f"PASS: {check} over {args.instances} instances")
    return EXIT_OK if ok else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcnsim",
        description="Coalition-game D2D resource allocation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--cellular", "-C", type=int, default=8,
                       help="number of cellular users")
        p.add_argument("--d2d", "-D", type=int, default=30,
                       help="number of D2D pairs")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--side-length", dest="side_length", type=float)
        p.add_argument("--beamwidth", type=float,
                       help="half-power beamwidth, degrees")
        p.add_argument("--beta", type=float, help="blockage parameter per m")
        p.add_argument("--offset", type=float,
                       help="max per-axis D2D tx-rx offset, meters")
        p.add_argument("--fading", choices=("average", "rayleigh"))

    p_run = sub.add_parser("run", help="single scenario, one scheme")
    add_common(p_run)
    p_run.add_argument("--scheme", default="cg",
                       choices=("cg", "fmc", "rc", "ccg", "fcc", "os"))
    p_run.add_argument("--budget", type=int, default=baselines.DEFAULT_BUDGET)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--no-plot", action="store_true",
                         help="skip figure rendering")
    p_sweep.add_argument("--traces", action="store_true",
                         help="write per-trial switch traces")
    p_sweep.set_defaults(func=cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="exhaustive optimum on a small instance")
    add_common(p_oracle)
    p_oracle.add_argument("--budget", type=int,
                          default=baselines.DEFAULT_BUDGET)
    p_oracle.set_defaults(func=cmd_oracle)

    p_val = sub.add_parser("validate",
                           help="invariant suite on random instances")
    p_val.add_argument("--instances", type=int, default=20)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ConfigError, InvalidScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
