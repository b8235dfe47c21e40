"""Deterministic discrete-event simulator for the tick-dispatching strategies.

At every event time, interrupts due at that instant fire in ascending timer
order and release jobs, the running job's completion is processed, deadline
expiries abandon late jobs, and a preemptive fixed-priority scheduler
(rate-monotonic, optional round-robin time slice of one unit among equal
periods) picks the next job.  Jobs released at the same instant enter the
ready list in a canonical order (period, then task id), so release traces and
miss sets depend only on the configuration, never on per-strategy list
layouts.

Overhead accounting: every primitive executed by the interrupt and delay
routines is charged to ledgers (see :mod:`.dispatch`).  With
``overhead_as_time`` enabled, interrupt-path cost additionally consumes CPU
time at ``time_scale`` cost units per time unit: whole time units are spent
on overhead before any job work proceeds, which is what can make dense tick
configurations unschedulable.  Delay-path cost is accounted but runs in task
context and does not consume time.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, TextIO

from .dispatch import (
    CostWeights,
    DispatcherState,
    Strategy,
    delay_task,
    tick,
)
from .errors import ConfigError, UsageError
from .model import (
    Mapping,
    TaskSet,
    expected_interrupt_rate,
    is_harmonic_chain,
    rational_to_json,
    single_timer_mapping,
)


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: task set, mapping, strategy, and accounting knobs.

    ``horizon=None`` runs until every task has retired (requires finite
    release limits).  ``period_factor`` documents the uniform scaling already
    applied to the task set and mapping; the baseline strategy configures its
    single timer with that period.
    """

    task_set: TaskSet
    strategy: Strategy
    mapping: Mapping | None = None
    weights: CostWeights = field(default_factory=CostWeights)
    horizon: int | None = None
    period_factor: int = 1
    time_slice: bool = True
    overhead_as_time: bool = False
    time_scale: int = 100
    collect_trace: bool = True
    trace_limit: int = 100_000
    check_invariants: bool = False


@dataclass
class TimerStats:
    id: int
    period: int
    interrupts: int = 0
    required: int = 0


@dataclass
class SimMetrics:
    """Aggregated counts from one run; required + not-required = total."""

    strategy: str
    per_timer: list[TimerStats]
    total_interrupts: int
    required_interrupts: int
    not_required_interrupts: int
    interrupt_cost: int
    delay_cost: int
    total_cost: int
    interrupt_counters: dict[str, int]
    delay_counters: dict[str, int]
    deadline_misses: int
    miss_events: list[tuple[int, int]]          # (time, task)
    harmonic_skips: list[tuple[int, int, int]]  # (time, timer, task)
    jobs_completed: int
    total_time: int
    busy_time: int
    idle_time: int
    overhead_time: int
    expected_rate: Fraction
    release_trace: list[tuple[int, int]] | None         # (time, task)
    interrupt_log: list[tuple[int, int, int]] | None    # (time, timer, released)
    events: list[tuple[int, str, int | None, int | None]] | None

    @property
    def schedulable(self) -> bool:
        return self.deadline_misses == 0

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "per_timer": [
                {"id": s.id, "period": s.period, "interrupts": s.interrupts,
                 "required": s.required}
                for s in self.per_timer
            ],
            "total_interrupts": self.total_interrupts,
            "required_interrupts": self.required_interrupts,
            "not_required_interrupts": self.not_required_interrupts,
            "interrupt_cost": self.interrupt_cost,
            "delay_cost": self.delay_cost,
            "total_cost": self.total_cost,
            "deadline_misses": self.deadline_misses,
            "miss_events": [{"time": t, "task": tid} for t, tid in self.miss_events],
            "harmonic_skips": [
                {"time": t, "timer": j, "task": tid}
                for t, j, tid in self.harmonic_skips
            ],
            "jobs_completed": self.jobs_completed,
            "total_time": self.total_time,
            "busy_time": self.busy_time,
            "idle_time": self.idle_time,
            "overhead_time": self.overhead_time,
            "expected_rate": rational_to_json(self.expected_rate),
            "schedulable": self.schedulable,
        }


METRICS_CSV_COLUMNS = (
    "strategy", "total_interrupts", "required_interrupts",
    "not_required_interrupts", "interrupt_cost", "delay_cost", "total_cost",
    "deadline_misses", "jobs_completed", "total_time", "busy_time",
    "idle_time", "overhead_time", "expected_rate", "schedulable",
)


def metrics_csv_rows(metrics: SimMetrics) -> list[dict[str, object]]:
    return [{
        "strategy": metrics.strategy,
        "total_interrupts": metrics.total_interrupts,
        "required_interrupts": metrics.required_interrupts,
        "not_required_interrupts": metrics.not_required_interrupts,
        "interrupt_cost": metrics.interrupt_cost,
        "delay_cost": metrics.delay_cost,
        "total_cost": metrics.total_cost,
        "deadline_misses": metrics.deadline_misses,
        "jobs_completed": metrics.jobs_completed,
        "total_time": metrics.total_time,
        "busy_time": metrics.busy_time,
        "idle_time": metrics.idle_time,
        "overhead_time": metrics.overhead_time,
        "expected_rate": f"{float(metrics.expected_rate):.12g}",
        "schedulable": int(metrics.schedulable),
    }]


def write_metrics_csv(metrics: SimMetrics, fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=METRICS_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in metrics_csv_rows(metrics):
        writer.writerow(row)


def write_trace_csv(metrics: SimMetrics, fh: TextIO) -> None:
    """Event trace as (time, event_kind, timer, task) rows."""
    if metrics.events is None:
        raise UsageError("run was configured without trace collection")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("time", "event_kind", "timer", "task"))
    for time_, kind, timer, task in metrics.events:
        writer.writerow((time_, kind, "" if timer is None else timer,
                         "" if task is None else task))


@dataclass
class _Job:
    task_id: int
    release: int
    deadline: int
    remaining: int
    index: int  # k-th timer-driven release; the synchronous start job is k=0


def run(config: SimConfig) -> SimMetrics:
    """Simulate one configuration to its horizon or until all tasks retire."""
    task_set = config.task_set
    if not task_set.tasks:
        raise UsageError("task set is empty")
    task_set.hyperperiod()  # rejects overflow early
    if config.horizon is not None and config.horizon < 1:
        raise UsageError(f"horizon must be >= 1, got {config.horizon}")
    if config.horizon is None and any(
            t.releases_limit is None for t in task_set.tasks):
        raise ConfigError("unbounded release limits require a fixed horizon")
    if config.time_scale < 1:
        raise UsageError(f"time_scale must be >= 1, got {config.time_scale}")

    if config.strategy is Strategy.BASELINE:
        mapping = single_timer_mapping(task_set, period=config.period_factor)
    else:
        if config.mapping is None:
            raise ConfigError(f"strategy {config.strategy.value} requires a mapping")
        mapping = config.mapping
        mapping.validate(task_set)

    state = DispatcherState(task_set, mapping, config.strategy,
                            check_invariants=config.check_invariants)
    weights = config.weights
    tasks = {t.id: t for t in task_set.tasks}
    used_timers = sorted(mapping.used_timers(), key=lambda tc: tc.id)
    timer_stats = {tc.id: TimerStats(id=tc.id, period=tc.period) for tc in used_timers}
    next_fire = {tc.id: tc.period for tc in used_timers}

    horizon = config.horizon
    as_time = config.overhead_as_time
    scale = config.time_scale
    collect = config.collect_trace
    limit = config.trace_limit

    jobs: dict[int, _Job] = {}
    retired: set[int] = set()
    ready: list[tuple[int, int, int, int, int]] = []  # (period, time, kind, task, job index)
    running: int | None = None
    running_since = 0

    pending_cost = 0
    busy_time = 0
    idle_time = 0
    overhead_time = 0
    jobs_completed = 0
    miss_events: list[tuple[int, int]] = []
    release_trace: list[tuple[int, int]] | None = [] if collect else None
    interrupt_log: list[tuple[int, int, int]] | None = [] if collect else None
    events: list[tuple[int, str, int | None, int | None]] | None = [] if collect else None

    def trace(time_: int, kind: str, timer: int | None, task: int | None) -> None:
        if events is not None and len(events) < limit:
            events.append((time_, kind, timer, task))

    def complete_job(tid: int, now: int) -> None:
        nonlocal jobs_completed
        job = jobs.pop(tid)
        jobs_completed += 1
        trace(now, "complete", None, tid)
        limit_k = tasks[tid].releases_limit
        if limit_k is not None and job.index >= limit_k:
            retired.add(tid)
            trace(now, "retire", None, tid)
        else:
            delay_task(state, tid, now)
            trace(now, "delay", None, tid)

    def abandon_job(tid: int, now: int) -> None:
        job = jobs.pop(tid)
        miss_events.append((now, tid))
        trace(now, "miss", None, tid)
        limit_k = tasks[tid].releases_limit
        if limit_k is not None and job.index >= limit_k:
            retired.add(tid)
            trace(now, "retire", None, tid)
        else:
            delay_task(state, tid, now)
            trace(now, "delay", None, tid)

    def prune_ready() -> None:
        while ready:
            _, _, _, tid, jidx = ready[0]
            job = jobs.get(tid)
            if job is None or job.index != jidx:
                heapq.heappop(ready)
            else:
                break

    def admit_releases(now: int, seq_kind: int) -> None:
        """Move dispatcher releases into the ready structure canonically."""
        for tid in state.take_ready():
            job = _Job(
                task_id=tid,
                release=now,
                deadline=now + tasks[tid].deadline,
                remaining=tasks[tid].wcet,
                index=now // tasks[tid].period,
            )
            jobs[tid] = job
            heapq.heappush(ready, (tasks[tid].period, now, seq_kind, tid, job.index))
            if now > 0:
                # The synchronous start at t=0 is not an interrupt-driven release.
                if release_trace is not None and len(release_trace) < limit:
                    release_trace.append((now, tid))
                trace(now, "release", state.tasks[tid].timer_id, tid)

    def drain_and_schedule(now: int) -> None:
        nonlocal running, running_since
        # Zero-length jobs complete without occupying the CPU.
        prune_ready()
        while ready and jobs[ready[0][3]].remaining == 0:
            tid = heapq.heappop(ready)[3]
            complete_job(tid, now)
            prune_ready()
        if running is not None and jobs[running].remaining == 0:
            complete_job(running, now)
            running = None
        prune_ready()
        if not ready:
            return
        top_period = ready[0][0]
        if running is None:
            running = heapq.heappop(ready)[3]
            running_since = now
        elif top_period < tasks[running].period:
            job = jobs[running]
            heapq.heappush(ready, (tasks[running].period, now, 0, running, job.index))
            trace(now, "preempt", None, running)
            running = heapq.heappop(ready)[3]
            running_since = now
        elif (config.time_slice and top_period == tasks[running].period
              and now - running_since >= 1):
            job = jobs[running]
            heapq.heappush(ready, (tasks[running].period, now, 2, running, job.index))
            running = heapq.heappop(ready)[3]
            running_since = now

    def advance(start: int, end: int) -> None:
        nonlocal pending_cost, busy_time, idle_time, overhead_time
        span = end - start
        if span <= 0:
            return
        spent = 0
        if as_time:
            spent = min(span, pending_cost // scale)
            pending_cost -= spent * scale
            overhead_time += spent
        rest = span - spent
        if running is not None:
            work = min(rest, jobs[running].remaining)
            jobs[running].remaining -= work
            busy_time += work
            rest -= work
        idle_time += rest

    # The synchronous start: every task is ready with its k=0 job.
    admit_releases(0, 1)
    drain_and_schedule(0)
    t = 0

    while True:
        if horizon is None and len(retired) == len(tasks) and running is None and not jobs:
            break
        candidates: list[int] = []
        if next_fire and (horizon is not None or len(retired) < len(tasks)):
            candidates.append(min(next_fire.values()))
        if running is not None:
            backlog = pending_cost // scale if as_time else 0
            candidates.append(t + backlog + jobs[running].remaining)
        if jobs:
            candidates.append(min(job.deadline for job in jobs.values()))
        prune_ready()
        if (config.time_slice and running is not None and ready
                and ready[0][0] == tasks[running].period):
            candidates.append(max(running_since + 1, t + 1))
        if horizon is not None:
            candidates = [c for c in candidates if c <= horizon]
            if not candidates:
                advance(t, horizon)
                t = horizon
                break
        elif not candidates:
            break
        t_next = min(candidates)
        advance(t, t_next)
        t = t_next

        # Interrupts fire in ascending timer order; each charges its own entry.
        for tc in used_timers:
            if next_fire[tc.id] != t:
                continue
            before = state.interrupt_ledger.total(weights)
            skips_before = len(state.skip_events)
            released = tick(state, tc.id)
            pending_cost += state.interrupt_ledger.total(weights) - before
            stats = timer_stats[tc.id]
            stats.interrupts += 1
            if released:
                stats.required += 1
            if interrupt_log is not None and len(interrupt_log) < limit:
                interrupt_log.append((t, tc.id, len(released)))
            trace(t, "interrupt", tc.id, None)
            for _, timer_id, tid in state.skip_events[skips_before:]:
                trace(t, "skip", timer_id, tid)
            next_fire[tc.id] += tc.period
        admit_releases(t, 1)

        if running is not None and jobs[running].remaining == 0:
            complete_job(running, t)
            running = None
        for tid in sorted(jobs):
            job = jobs.get(tid)
            if job is not None and job.deadline <= t and job.remaining > 0:
                if tid == running:
                    running = None
                abandon_job(tid, t)
        drain_and_schedule(t)

    total_time = t
    per_timer = [timer_stats[tc.id] for tc in used_timers]
    total_interrupts = sum(s.interrupts for s in per_timer)
    required = sum(s.required for s in per_timer)
    interrupt_cost = state.interrupt_ledger.total(weights)
    delay_cost = state.delay_ledger.total(weights)
    return SimMetrics(
        strategy=config.strategy.value,
        per_timer=per_timer,
        total_interrupts=total_interrupts,
        required_interrupts=required,
        not_required_interrupts=total_interrupts - required,
        interrupt_cost=interrupt_cost,
        delay_cost=delay_cost,
        total_cost=interrupt_cost + delay_cost,
        interrupt_counters=state.interrupt_ledger.snapshot(),
        delay_counters=state.delay_ledger.snapshot(),
        deadline_misses=len(miss_events),
        miss_events=miss_events,
        harmonic_skips=list(state.skip_events),
        jobs_completed=jobs_completed,
        total_time=total_time,
        busy_time=busy_time,
        idle_time=idle_time,
        overhead_time=overhead_time,
        expected_rate=expected_interrupt_rate(mapping),
        release_trace=release_trace,
        interrupt_log=interrupt_log,
        events=events,
    )


# ---------------------------------------------------------------------------
# Comparison and sweeps
# ---------------------------------------------------------------------------

def classify(missed_by_strategy: dict[Strategy, bool]) -> str:
    """Schedulability region label following the evaluation convention:

    every strategy miss-free -> "schedulable"; none -> "not-schedulable";
    only the harmonic dispatcher miss-free -> "harmonic"; a multi-timer list
    dispatcher miss-free while the baseline misses -> "chronos"; anything
    else -> "mixed".
    """
    ok = {s for s, missed in missed_by_strategy.items() if not missed}
    if ok == set(missed_by_strategy):
        return "schedulable"
    if not ok:
        return "not-schedulable"
    if ok == {Strategy.CHRONOS_HARMONIC}:
        return "harmonic"
    if (ok & {Strategy.CHRONOS, Strategy.CHRONOS_CONST}) and Strategy.BASELINE not in ok:
        return "chronos"
    return "mixed"


@dataclass
class StrategyOutcome:
    strategy: str
    metrics: SimMetrics
    overhead_ratio: Fraction | None  # reference cost / this strategy's cost


@dataclass
class ComparisonReport:
    outcomes: list[StrategyOutcome]
    classification: str

    def to_json(self) -> dict:
        return {
            "classification": self.classification,
            "strategies": [
                {
                    "strategy": o.strategy,
                    "overhead_ratio": (None if o.overhead_ratio is None
                                       else rational_to_json(o.overhead_ratio)),
                    "metrics": o.metrics.to_json(),
                }
                for o in self.outcomes
            ],
        }


def compare(configs: list[SimConfig]) -> ComparisonReport:
    """Run several configurations over one task set and compare overheads.

    The overhead ratio is the baseline's cumulative cost divided by each
    strategy's cumulative cost; without a baseline entry the first
    configuration is the reference.
    """
    if len(configs) < 2:
        raise UsageError("compare needs at least two configurations")
    first = configs[0]
    for other in configs[1:]:
        if other.task_set != first.task_set:
            raise UsageError("compare requires an identical task set everywhere")
        if other.weights != first.weights:
            raise UsageError("compare requires identical cost weights everywhere")
    metrics = [run(c) for c in configs]
    reference = metrics[0]
    for cfg, m in zip(configs, metrics):
        if cfg.strategy is Strategy.BASELINE:
            reference = m
            break
    outcomes = []
    for m in metrics:
        ratio = Fraction(reference.total_cost, m.total_cost) if m.total_cost else None
        outcomes.append(StrategyOutcome(strategy=m.strategy, metrics=m,
                                        overhead_ratio=ratio))
    missed = {cfg.strategy: m.deadline_misses > 0 for cfg, m in zip(configs, metrics)}
    return ComparisonReport(outcomes=outcomes, classification=classify(missed))


SWEEP_CSV_COLUMNS = (
    "factor", "strategy", "normalized_rate", "total_interrupts",
    "required_interrupts", "not_required_interrupts", "interrupt_cost",
    "delay_cost", "total_cost", "total_time", "deadline_misses",
    "overhead_fraction", "overhead_ratio", "schedulable_class", "error",
)


@dataclass
class SweepRow:
    factor: int
    strategy: str = ""
    normalized_rate: Fraction | None = None
    total_interrupts: int | None = None
    required_interrupts: int | None = None
    not_required_interrupts: int | None = None
    interrupt_cost: int | None = None
    delay_cost: int | None = None
    total_cost: int | None = None
    total_time: int | None = None
    deadline_misses: int | None = None
    overhead_fraction: Fraction | None = None
    overhead_ratio: Fraction | None = None
    schedulable_class: str = ""
    error: str | None = None


@dataclass
class SweepSummary:
    strategy: str
    peak_ratio: Fraction | None
    mean_ratio: float | None  # geometric mean over factors schedulable under any method


@dataclass
class SweepTable:
    rows: list[SweepRow]

    def strategies(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.strategy and row.strategy not in seen:
                seen.append(row.strategy)
        return seen

    def summary(self) -> list[SweepSummary]:
        out = []
        for strategy in self.strategies():
            if strategy == Strategy.BASELINE.value:
                continue
            ratios = [
                row.overhead_ratio for row in self.rows
                if row.strategy == strategy and row.error is None
                and row.overhead_ratio is not None
            ]
            eligible = [
                row.overhead_ratio for row in self.rows
                if row.strategy == strategy and row.error is None
                and row.overhead_ratio is not None
                and row.schedulable_class != "not-schedulable"
            ]
            peak = max(ratios) if ratios else None
            mean = None
            if eligible:
                mean = math.exp(
                    sum(math.log(float(r)) for r in eligible) / len(eligible))
            out.append(SweepSummary(strategy=strategy, peak_ratio=peak,
                                    mean_ratio=mean))
        return out

    def format_summary(self) -> str:
        lines = [f"{'strategy':<18} {'peak reduction':>15} {'mean reduction':>15}"]
        for s in self.summary():
            peak = f"{float(s.peak_ratio):.2f}x" if s.peak_ratio is not None else "-"
            mean = f"{s.mean_ratio:.2f}x" if s.mean_ratio is not None else "-"
            lines.append(f"{s.strategy:<18} {peak:>15} {mean:>15}")
        return "\n".join(lines)

    def monotonicity_violations(self) -> list[tuple[int, int]]:
        """Factor pairs (p, p+1) where a schedulable factor regresses.

        Schedulability gained at a factor is expected to persist at larger
        factors when the workload is held constant; this is observed rather
        than guaranteed, so violations are reported, not asserted.
        """
        classes: dict[int, str] = {}
        for row in self.rows:
            if row.error is None and row.factor not in classes:
                classes[row.factor] = row.schedulable_class
        ordered = sorted(classes)
        return [
            (a, b) for a, b in zip(ordered, ordered[1:])
            if b == a + 1
            and classes[a] == "schedulable" and classes[b] != "schedulable"
        ]

    def to_json(self) -> dict:
        return {"rows": [
            {
                "factor": row.factor,
                "strategy": row.strategy,
                "normalized_rate": (None if row.normalized_rate is None
                                    else rational_to_json(row.normalized_rate)),
                "total_interrupts": row.total_interrupts,
                "required_interrupts": row.required_interrupts,
                "not_required_interrupts": row.not_required_interrupts,
                "interrupt_cost": row.interrupt_cost,
                "delay_cost": row.delay_cost,
                "total_cost": row.total_cost,
                "total_time": row.total_time,
                "deadline_misses": row.deadline_misses,
                "overhead_fraction": (None if row.overhead_fraction is None
                                      else rational_to_json(row.overhead_fraction)),
                "overhead_ratio": (None if row.overhead_ratio is None
                                   else rational_to_json(row.overhead_ratio)),
                "schedulable_class": row.schedulable_class,
                "error": row.error,
            }
            for row in self.rows
        ]}

    def to_csv(self, fh: TextIO) -> None:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({
                "factor": row.factor,
                "strategy": row.strategy,
                "normalized_rate": _fmt_fraction(row.normalized_rate),
                "total_interrupts": _fmt_opt(row.total_interrupts),
                "required_interrupts": _fmt_opt(row.required_interrupts),
                "not_required_interrupts": _fmt_opt(row.not_required_interrupts),
                "interrupt_cost": _fmt_opt(row.interrupt_cost),
                "delay_cost": _fmt_opt(row.delay_cost),
                "total_cost": _fmt_opt(row.total_cost),
                "total_time": _fmt_opt(row.total_time),
                "deadline_misses": _fmt_opt(row.deadline_misses),
                "overhead_fraction": _fmt_fraction(row.overhead_fraction),
                "overhead_ratio": _fmt_fraction(row.overhead_ratio),
                "schedulable_class": row.schedulable_class,
                "error": row.error or "",
            })


def _fmt_fraction(value: Fraction | None) -> str:
    return "" if value is None else f"{float(value):.12g}"


def _fmt_opt(value: int | None) -> str | int:
    return "" if value is None else value


def applicable_strategies(task_set: TaskSet, mapping: Mapping) -> list[Strategy]:
    """Baseline and both list dispatchers always; slots only on harmonic groups."""
    strategies = [Strategy.BASELINE, Strategy.CHRONOS, Strategy.CHRONOS_CONST]
    harmonic = all(
        is_harmonic_chain([task_set.by_id(t).period for t in group])
        for group in mapping.groups().values()
    )
    if harmonic:
        strategies.append(Strategy.CHRONOS_HARMONIC)
    return strategies


def period_factor_sweep(base: SimConfig, factors: Iterable[int],
                        strategies: list[Strategy] | None = None) -> SweepTable:
    """Scale all task and timer periods by each factor and re-run all strategies.

    The normalized expected-interrupt column divides the mapping's rate by the
    baseline single-timer rate at the same factor, so it is constant across
    factors.  Rows that fail (for example a scaled hyperperiod overflowing)
    are reported as per-factor error entries.
    """
    factor_list = list(factors)
    if not factor_list:
        raise UsageError("factor list must be nonempty")
    if any(p < 1 for p in factor_list):
        raise UsageError(f"factors must be >= 1, got {factor_list}")
    if base.mapping is None:
        raise UsageError("sweep requires a mapping in the base configuration")
    if strategies is None:
        strategies = applicable_strategies(base.task_set, base.mapping)

    rows: list[SweepRow] = []
    for factor in factor_list:
        try:
            ts_scaled = base.task_set.scaled(factor)
            map_scaled = base.mapping.scaled(factor)
            ts_scaled.hyperperiod()
            # A fixed observation window scales with the periods.
            horizon = None if base.horizon is None else base.horizon * factor
            metrics: dict[Strategy, SimMetrics] = {}
            for strategy in strategies:
                cfg = replace(
                    base,
                    task_set=ts_scaled,
                    mapping=None if strategy is Strategy.BASELINE else map_scaled,
                    strategy=strategy,
                    period_factor=factor,
                    horizon=horizon,
                )
                metrics[strategy] = run(cfg)
            missed = {s: m.deadline_misses > 0 for s, m in metrics.items()}
            sched_class = classify(missed)
            reference = metrics.get(Strategy.BASELINE,
                                    metrics[next(iter(metrics))])
            rate = expected_interrupt_rate(map_scaled)
            for strategy in strategies:
                m = metrics[strategy]
                if strategy is Strategy.BASELINE:
                    normalized = Fraction(1)
                else:
                    normalized = rate / Fraction(1, factor)
                ratio = (Fraction(reference.total_cost, m.total_cost)
                         if m.total_cost else None)
                fraction = (Fraction(m.total_cost, m.total_time * base.time_scale)
                            if m.total_time else None)
                rows.append(SweepRow(
                    factor=factor,
                    strategy=m.strategy,
                    normalized_rate=normalized,
                    total_interrupts=m.total_interrupts,
                    required_interrupts=m.required_interrupts,
                    not_required_interrupts=m.not_required_interrupts,
                    interrupt_cost=m.interrupt_cost,
                    delay_cost=m.delay_cost,
                    total_cost=m.total_cost,
                    total_time=m.total_time,
                    deadline_misses=m.deadline_misses,
                    overhead_fraction=fraction,
                    overhead_ratio=ratio,
                    schedulable_class=sched_class,
                ))
        except ConfigError as exc:
            rows.append(SweepRow(factor=factor, error=str(exc)))
    return SweepTable(rows=rows)
