"""Command-line front end: generate, optimize, simulate, sweep, report.

Exit codes: 0 success, 2 bad input, 3 inconsistent configuration, 4 internal
error.  ``optimize`` additionally exits 5 when the solution came from the
heuristic rather than the exact solver.  Scenario files plus a seed fully
determine every output byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import fields as dataclass_fields
from importlib import resources

from . import model, optimizer, sim
from .dispatch import CostWeights, Strategy
from .errors import ChronosimError, ConfigError, UsageError

PRESETS = ("low", "high", "harmonic_single", "harmonic_low", "harmonic_high")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4
EXIT_HEURISTIC = 5


def _load_scenario(args) -> dict:
    if getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {PRESETS}")
        text = resources.files("chronosim").joinpath(
            "presets", f"{args.preset}.json").read_text(encoding="utf-8")
        return json.loads(text)
    if getattr(args, "scenario", None):
        return model.load_json(args.scenario)
    raise UsageError("a scenario file or --preset is required")


def _generation_spec(scenario: dict, seed_override: int | None) -> model.GenerationSpec:
    gen = scenario.get("generation")
    if gen is None:
        raise UsageError("scenario has no 'generation' section")
    try:
        return model.GenerationSpec(
            base_periods=tuple(int(b) for b in gen["base_periods"]),
            factor_range=tuple(int(r) for r in gen["factor_range"]),
            n_tasks=int(gen["n_tasks"]),
            period_factor=int(gen.get("period_factor", 1)),
            rng_seed=int(gen["seed"] if seed_override is None else seed_override),
            workload=int(gen.get("workload", 1)),
            harmonic=bool(gen.get("harmonic", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed generation section: {exc}") from exc


def _scenario_task_set(scenario: dict, seed_override: int | None) -> model.TaskSet:
    if "tasks" in scenario:
        return model.task_set_from_json(scenario)
    return model.generate_task_set(_generation_spec(scenario, seed_override))


def _weights(scenario: dict) -> CostWeights:
    overrides = scenario.get("weights", {})
    known = {f.name for f in dataclass_fields(CostWeights)}
    unknown = set(overrides) - known
    if unknown:
        raise UsageError(f"unknown cost weights: {sorted(unknown)}")
    return CostWeights(**{k: int(v) for k, v in overrides.items()})


def _factors(scenario: dict) -> list[int]:
    raw = scenario.get("factors", [1, 15])
    if isinstance(raw, list) and len(raw) == 2 and raw[0] <= raw[1]:
        return list(range(int(raw[0]), int(raw[1]) + 1))
    if isinstance(raw, list):
        return [int(p) for p in raw]
    raise UsageError(f"malformed factors entry: {raw!r}")


def _scenario_horizon(scenario: dict, task_set: model.TaskSet) -> int | None:
    """A fixed horizon, either absolute or as a multiple of the largest period."""
    raw = scenario.get("horizon")
    if raw is None:
        return None
    if isinstance(raw, dict):
        try:
            multiple = int(raw["max_period_multiple"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed horizon entry: {raw!r}") from exc
        return multiple * max(task_set.periods())
    return int(raw)


def _strip_release_limits(task_set: model.TaskSet) -> model.TaskSet:
    """Steady-state runs observe the repeating release pattern over a fixed
    window instead of letting tasks retire mid-run."""
    return model.TaskSet(tuple(
        model.Task(id=t.id, wcet=t.wcet, period=t.period, deadline=t.deadline,
                   releases_limit=None)
        for t in task_set.tasks
    ))


def _solve_mapping(task_set: model.TaskSet, timers: int,
                   exact_bound: int) -> optimizer.OptimizationResult:
    problem = optimizer.OptimizationProblem.from_task_set(task_set, timers)
    try:
        return optimizer.solve_exact(problem, exact_bound=exact_bound)
    except UsageError:
        return optimizer.greedy_heuristic(problem)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    scenario = _load_scenario(args)
    task_set = _scenario_task_set(scenario, args.seed)
    model.dump_json(model.task_set_to_json(task_set), args.out)
    distinct = task_set.distinct_periods()
    chain = model.is_harmonic_chain(distinct)
    print(f"generated {task_set.n} tasks -> {args.out}")
    print(f"distinct periods ({len(distinct)}): {list(distinct)}")
    print(f"harmonic chain overall: {'yes' if chain else 'no'}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    task_set = model.task_set_from_json(model.load_json(args.task_set))
    result = _solve_mapping(task_set, args.timers, args.exact_bound)
    model.dump_json(result.to_json(), args.out)
    if args.export_lp:
        problem = optimizer.OptimizationProblem.from_task_set(task_set, args.timers)
        optimizer.export_miqcp(problem, args.export_lp)
        print(f"solver model -> {args.export_lp}")
    rate = result.objective
    print(f"{result.method} solve: {result.timers_used} timer(s), "
          f"objective {rate.numerator}/{rate.denominator} -> {args.out}")
    for tc in result.mapping.used_timers():
        print(f"  timer {tc.id}: period {tc.period}, "
              f"{len(result.mapping.tasks_of(tc.id))} task(s)")
    return EXIT_OK if result.method == "exact" else EXIT_HEURISTIC


def cmd_simulate(args) -> int:
    task_set = model.task_set_from_json(model.load_json(args.task_set))
    strategy = Strategy.from_label(args.strategy)
    mapping = None
    if args.mapping:
        mapping = model.mapping_from_json(model.load_json(args.mapping))
    if strategy is not Strategy.BASELINE and mapping is None:
        raise UsageError(f"strategy {strategy.value} requires --mapping")
    factor = args.period_factor
    if factor > 1:
        task_set = task_set.scaled(factor)
        mapping = mapping.scaled(factor) if mapping else None
    config = sim.SimConfig(
        task_set=task_set,
        strategy=strategy,
        mapping=mapping,
        horizon=args.horizon,
        period_factor=factor,
        overhead_as_time=args.overhead_as_time,
    )
    metrics = sim.run(config)
    if args.format == "json":
        model.dump_json(metrics.to_json(), args.out)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            sim.write_metrics_csv(metrics, fh)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            sim.write_trace_csv(metrics, fh)
    print(f"{metrics.strategy}: {metrics.total_interrupts} interrupts "
          f"({metrics.not_required_interrupts} not required), "
          f"{metrics.deadline_misses} deadline miss(es), "
          f"cost {metrics.total_cost} -> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    task_set = _scenario_task_set(scenario, args.seed)
    timers = int(scenario.get("timers", args.timers or 4))
    fixed_period = scenario.get("fixed_timer_period")
    if fixed_period is not None:
        mapping = model.single_timer_mapping(task_set, period=int(fixed_period))
    else:
        mapping = _solve_mapping(task_set, timers, args.exact_bound).mapping
    strategies = None
    if "strategies" in scenario:
        strategies = [Strategy.from_label(s) for s in scenario["strategies"]]
    horizon = _scenario_horizon(scenario, task_set)
    if scenario.get("steady_state"):
        if horizon is None:
            raise UsageError("steady_state scenarios need a fixed horizon")
        task_set = _strip_release_limits(task_set)
    base = sim.SimConfig(
        task_set=task_set,
        strategy=Strategy.BASELINE,
        mapping=mapping,
        weights=_weights(scenario),
        horizon=horizon,
        overhead_as_time=bool(scenario.get("overhead_as_time", False)),
        time_scale=int(scenario.get("time_scale", 100)),
        collect_trace=False,
    )
    table = sim.period_factor_sweep(base, _factors(scenario), strategies)
    with open(args.out, "w", encoding="utf-8") as fh:
        table.to_csv(fh)
    failures = [row for row in table.rows if row.error is not None]
    for row in failures:
        print(f"factor {row.factor}: ERROR {row.error}", file=sys.stderr)
    print(f"sweep table -> {args.out}")
    print(table.format_summary())
    for a, b in table.monotonicity_violations():
        print(f"note: schedulable at factor {a} but not at {b}", file=sys.stderr)
    if failures and len(failures) == len(table.rows):
        return EXIT_CONFIG
    return EXIT_OK


def cmd_report(args) -> int:
    """Recompute the overhead-reduction summary from an existing sweep CSV."""
    try:
        with open(args.sweep, "r", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {args.sweep}: {exc}") from exc
    per_strategy: dict[str, list[tuple[float, str]]] = {}
    for row in rows:
        strategy = row.get("strategy", "")
        ratio = row.get("overhead_ratio", "")
        if not strategy or strategy == Strategy.BASELINE.value or not ratio:
            continue
        per_strategy.setdefault(strategy, []).append(
            (float(ratio), row.get("schedulable_class", "")))
    if not per_strategy:
        raise UsageError(f"{args.sweep} contains no strategy rows")
    print(f"{'strategy':<18} {'peak reduction':>15} {'mean reduction':>15}")
    for strategy, entries in per_strategy.items():
        peak = max(r for r, _ in entries)
        eligible = [r for r, c in entries if c != "not-schedulable"]
        mean = (math.exp(sum(math.log(r) for r in eligible) / len(eligible))
                if eligible else None)
        mean_text = f"{mean:.2f}x" if mean is not None else "-"
        print(f"{strategy:<18} {peak:.2f}x".ljust(34) + f" {mean_text:>15}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronosim",
        description="Multi-timer tick dispatching: partition, simulate, compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a task set from a scenario")
    p.add_argument("scenario", nargs="?", help="scenario JSON file")
    p.add_argument("--preset", choices=PRESETS, help="shipped scenario preset")
    p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    p.add_argument("--out", required=True, help="task-set JSON output path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("optimize", help="find the mapping minimizing interrupt rate")
    p.add_argument("task_set", help="task-set JSON file")
    p.add_argument("--timers", type=int, required=True, help="timer budget m")
    p.add_argument("--out", required=True, help="mapping JSON output path")
    p.add_argument("--export-lp", default=None, help="also write the solver model")
    p.add_argument("--exact-bound", type=int, default=optimizer.DEFAULT_EXACT_BOUND,
                   help="max distinct periods for the exact solver")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="run one strategy over a task set")
    p.add_argument("task_set", help="task-set JSON file")
    p.add_argument("--mapping", default=None, help="mapping JSON file")
    p.add_argument("--strategy", required=True,
                   choices=[s.value for s in Strategy])
    p.add_argument("--horizon", type=int, default=None,
                   help="fixed horizon in time units (default: run to retirement)")
    p.add_argument("--period-factor", type=int, default=1,
                   help="uniformly scale all periods before running")
    p.add_argument("--overhead-as-time", action="store_true",
                   help="interrupt cost consumes simulated time")
    p.add_argument("--trace", default=None, help="write the event trace CSV here")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", required=True, help="metrics output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="period-factor sweep across strategies")
    p.add_argument("scenario", nargs="?", help="scenario JSON file")
    p.add_argument("--preset", choices=PRESETS, help="shipped scenario preset")
    p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    p.add_argument("--timers", type=int, default=None, help="timer budget fallback")
    p.add_argument("--exact-bound", type=int, default=optimizer.DEFAULT_EXACT_BOUND)
    p.add_argument("--out", required=True, help="sweep CSV output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="summarize an existing sweep CSV")
    p.add_argument("sweep", help="sweep CSV produced by the sweep command")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ChronosimError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
