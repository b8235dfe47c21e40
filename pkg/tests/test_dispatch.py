"""Hand-traced interrupt routines, delay paths, and cost-ledger contracts."""

import random

import pytest

from chronosim.dispatch import (
    TIME_MAX,
    DispatcherState,
    Strategy,
    delay_task,
    tick_baseline,
    tick_chronos,
    tick_chronos_const,
    tick_chronos_harmonic,
)
from chronosim.errors import ConfigError, InvariantViolation, UsageError
from chronosim.model import Mapping, Task, TaskSet, TimerConfig


def build_state(periods, timer_period, strategy, check=True):
    """One timer managing tasks with the given periods; all start ready."""
    ts = TaskSet(tuple(
        Task.implicit(i + 1, wcet=0, period=p, releases_limit=None)
        for i, p in enumerate(periods)
    ))
    mapping = Mapping(
        timers=(TimerConfig(1, timer_period),),
        assignment={t.id: 1 for t in ts.tasks},
    )
    state = DispatcherState(ts, mapping, strategy, check_invariants=check)
    state.take_ready()
    return state


def counter_delta(ledger, before):
    after = ledger.snapshot()
    return {k: after[k] - before[k] for k in after if after[k] != before[k]}


class TestTickChronos:
    def test_releases_due_head_and_caches_next(self):
        # tasks: tau1 next release 2, tau2 next release 4
        state = build_state([2, 4], 2, Strategy.CHRONOS)
        delay_task(state, 1, 0)
        delay_task(state, 2, 0)
        before = state.interrupt_ledger.snapshot()
        released = tick_chronos(state, 1)
        assert released == [1]
        assert state.timers[1].next_release == 4
        delta = counter_delta(state.interrupt_ledger, before)
        # guard + two head inspections; one removal; one ready insertion
        assert delta == {"interrupt": 1, "tick_increment": 1, "comparison": 3,
                         "list_remove": 1, "ready_insert": 1}

    def test_empty_list_early_exit_with_sentinel(self):
        state = build_state([2], 2, Strategy.CHRONOS)
        assert state.timers[1].next_release == TIME_MAX
        state.timers[1].tick = 2
        before = state.interrupt_ledger.snapshot()
        released = tick_chronos(state, 1)
        assert released == []
        # guard comparison only: the sentinel guarantees the early exit
        assert counter_delta(state.interrupt_ledger, before) == {
            "interrupt": 1, "tick_increment": 1, "comparison": 1}

    def test_emptying_the_list_parks_the_sentinel(self):
        state = build_state([10], 5, Strategy.CHRONOS)
        delay_task(state, 1, 0)  # next release 10
        state.timers[1].tick = 5
        released = tick_chronos(state, 1)
        assert released == [1]
        assert state.timers[1].next_release == TIME_MAX

    def test_detects_unsorted_list_in_checked_mode(self):
        state = build_state([2, 4], 2, Strategy.CHRONOS)
        delay_task(state, 1, 0)
        delay_task(state, 2, 0)
        state.timers[1].queue.reverse()  # corrupt the order
        with pytest.raises(InvariantViolation):
            tick_chronos(state, 1)


class TestTickChronosConst:
    def setup_list(self):
        # append order: tau3 (next 9), tau1 (next 6), tau2 (next 12)
        state = build_state([6, 12, 9], 3, Strategy.CHRONOS_CONST)
        delay_task(state, 3, 0)
        delay_task(state, 1, 0)
        delay_task(state, 2, 0)
        assert state.timers[1].queue == [3, 1, 2]
        return state

    def test_full_scan_releases_and_rebuilds_minimum(self):
        state = self.setup_list()
        state.timers[1].tick = 3
        before = state.interrupt_ledger.snapshot()
        released = tick_chronos_const(state, 1)
        assert released == [1]
        assert state.timers[1].next_release == 9
        delta = counter_delta(state.interrupt_ledger, before)
        # one guard comparison plus one inspection per list entry
        assert delta["comparison"] - 1 == 3
        assert delta["list_remove"] == 1

    def test_early_exit_inspects_nothing(self):
        state = self.setup_list()  # earliest next release is 6
        before = state.interrupt_ledger.snapshot()
        released = tick_chronos_const(state, 1)  # tick 0 -> 3, below 6
        assert released == []
        # guard only: no entry of the list is inspected
        assert counter_delta(state.interrupt_ledger, before) == {
            "interrupt": 1, "tick_increment": 1, "comparison": 1}

    def test_releases_all_when_everything_due(self):
        state = build_state([12, 9], 3, Strategy.CHRONOS_CONST)
        delay_task(state, 1, 0)  # next 12
        delay_task(state, 2, 0)  # next 9
        state.timers[1].tick = 9
        released = tick_chronos_const(state, 1)
        assert sorted(released) == [1, 2]
        assert state.timers[1].next_release == TIME_MAX


class TestTickChronosHarmonic:
    def build_chain(self):
        state = build_state([3, 6, 12], 3, Strategy.CHRONOS_HARMONIC)
        delay_task(state, 1, 0)
        delay_task(state, 2, 0)
        delay_task(state, 3, 0)
        return state

    def test_rejects_non_harmonic_group(self):
        with pytest.raises(ConfigError):
            build_state([2, 3], 1, Strategy.CHRONOS_HARMONIC)

    def test_first_tick_releases_only_smallest_period(self):
        state = self.build_chain()
        released = tick_chronos_harmonic(state, 1)  # tick 3: 3 mod 6 != 0 breaks
        assert released == [1]

    def test_releases_prefix_of_due_slots(self):
        state = self.build_chain()
        tick_chronos_harmonic(state, 1)           # tick 3
        delay_task(state, 1, 3)                   # back into its slot, next 6
        before = state.interrupt_ledger.snapshot()
        released = tick_chronos_harmonic(state, 1)  # tick 6
        assert released == [1, 2]                 # break at 6 mod 12 != 0
        delta = counter_delta(state.interrupt_ledger, before)
        assert delta["comparison"] == 3           # slots 1..3 inspected
        assert delta["slot_write"] == 2

    def test_vacant_slot_skipped_and_flagged(self):
        state = self.build_chain()
        tick_chronos_harmonic(state, 1)   # tick 3 releases tau1
        tick_chronos_harmonic(state, 1)   # tick 6: tau1 slot vacant -> skip; tau2 due
        delay_task(state, 2, 6)
        tick_chronos_harmonic(state, 1)   # tick 9: tau1 slot vacant -> skip
        released = tick_chronos_harmonic(state, 1)  # tick 12
        assert released == [2, 3]
        flagged = [(t, task) for t, _, task in state.skip_events]
        assert (6, 1) in flagged and (9, 1) in flagged and (12, 1) in flagged

    def test_inspections_bounded_by_group_size(self):
        state = self.build_chain()
        for _ in range(32):
            before = state.interrupt_ledger.snapshot()
            released = tick_chronos_harmonic(state, 1)
            delta = counter_delta(state.interrupt_ledger, before)
            assert delta["comparison"] <= 3
            for tid in released:
                delay_task(state, tid, state.timers[1].tick)


class TestTickBaseline:
    def test_two_task_figure_trace(self):
        state = build_state([2, 5], 1, Strategy.BASELINE)
        delay_task(state, 1, 0)
        delay_task(state, 2, 0)
        releases_by_tick = {}
        for t in range(1, 11):
            released = tick_baseline(state)
            releases_by_tick[t] = list(released)
            for tid in released:
                delay_task(state, tid, t)
        released_ticks = {t for t, r in releases_by_tick.items() if r}
        assert released_ticks == {2, 4, 5, 6, 8, 10}
        assert {t for t, r in releases_by_tick.items() if not r} == {1, 3, 7, 9}

    def test_single_task_early_exits_until_due(self):
        state = build_state([4], 1, Strategy.BASELINE)
        delay_task(state, 1, 0)
        assert [tick_baseline(state) for _ in range(4)] == [[], [], [], [1]]

    def test_exhausted_list_always_early_exits(self):
        state = build_state([4], 1, Strategy.BASELINE)
        delay_task(state, 1, 0)
        for _ in range(4):
            tick_baseline(state)
        # never re-delayed: every further tick exits on the sentinel
        for _ in range(8):
            before = state.interrupt_ledger.snapshot()
            assert tick_baseline(state) == []
            assert counter_delta(state.interrupt_ledger, before)["comparison"] == 1
        assert state.timers[1].next_release == TIME_MAX

    def test_requires_unit_period_single_timer(self):
        state = build_state([4], 2, Strategy.CHRONOS)
        with pytest.raises(UsageError):
            tick_baseline(state)


class TestDelayTask:
    def test_next_release_is_strictly_future_multiple(self):
        state = build_state([6], 3, Strategy.CHRONOS)
        delay_task(state, 1, 4)
        assert state.tasks[1].next_release == 6

    def test_completion_on_release_boundary_skips_to_next(self):
        state = build_state([6], 3, Strategy.CHRONOS)
        delay_task(state, 1, 6)
        assert state.tasks[1].next_release == 12

    def test_double_delay_is_invariant_violation(self):
        state = build_state([6], 3, Strategy.CHRONOS)
        delay_task(state, 1, 0)
        with pytest.raises(InvariantViolation):
            delay_task(state, 1, 0)

    def test_updates_cached_timer_next_release(self):
        state = build_state([6, 12], 3, Strategy.CHRONOS)
        delay_task(state, 2, 0)
        assert state.timers[1].next_release == 12
        delay_task(state, 1, 0)
        assert state.timers[1].next_release == 6

    def test_const_append_cost_independent_of_length(self):
        periods = [6 * (i + 1) for i in range(100)]
        state = build_state(periods, 6, Strategy.CHRONOS_CONST)
        deltas = set()
        for count in (1, 10, 100):
            st = build_state(periods, 6, Strategy.CHRONOS_CONST)
            for tid in range(1, count):
                delay_task(st, tid, 0)
            before = st.delay_ledger.snapshot()
            delay_task(st, count, 0)
            deltas.add(tuple(sorted(counter_delta(st.delay_ledger, before).items())))
        assert len(deltas) == 1  # identical charge at lengths 1, 10, and 100

    def test_sorted_insert_charges_traversal_steps(self):
        state = build_state([6, 12, 18], 6, Strategy.CHRONOS)
        delay_task(state, 1, 0)   # next 6, empty list: 0 steps
        delay_task(state, 2, 0)   # next 12, after one entry: 1 step
        before = state.delay_ledger.snapshot()
        delay_task(state, 3, 0)   # next 18, after two entries: 2 steps
        assert counter_delta(state.delay_ledger, before)["sorted_insert_step"] == 2
        assert state.timers[1].queue == [1, 2, 3]

    def test_sorted_insert_cost_at_most_linear_in_list_length(self):
        rng = random.Random(31)
        periods = [6 * (i + 1) for i in range(30)]
        state = build_state(periods, 6, Strategy.CHRONOS)
        for tid in rng.sample(range(1, 31), 30):
            length = len(state.timers[1].queue)
            before = state.delay_ledger.snapshot()
            delay_task(state, tid, 0)
            steps = counter_delta(state.delay_ledger, before).get(
                "sorted_insert_step", 0)
            assert steps <= length


class TestSortedOrderProperty:
    def test_random_operation_sequences_preserve_order(self):
        rng = random.Random(4242)
        periods = [2, 4, 6, 8, 12, 24]
        state = build_state(periods, 2, Strategy.CHRONOS)
        ready = set(range(1, len(periods) + 1))
        now = 0
        for _ in range(10_000):
            if ready and (rng.random() < 0.5 or len(ready) == len(periods)):
                tid = rng.choice(sorted(ready))
                delay_task(state, tid, now)   # checked mode verifies sortedness
                ready.discard(tid)
            else:
                now += 2
                for tid in tick_chronos(state, 1):
                    ready.add(tid)
            queue = state.timers[1].queue
            keys = [state.tasks[t].next_release for t in queue]
            assert keys == sorted(keys)
