"""Independent reference implementations used as test oracles.

These deliberately avoid the library's data paths: the segmentation oracle
replays each case separately with an explicit branch table, the DFG oracle
scans all position pairs, and the co-occurrence oracle recounts probabilities
with plain nested loops.
"""

from __future__ import annotations

import random
from collections import Counter

from careflow import Event, EventLog, SegmentationConfig, Trace


def naive_segment(log: EventLog, config: SegmentationConfig) -> tuple[list[Trace], int]:
    """Per-case replay of the trace-generation branch table."""
    alpha = config.start_activities
    d0 = config.delta0_days
    dn = config.delta_n_days

    per_case: dict[str, list[Event]] = {}
    case_order: list[str] = []
    for event in log:
        if event.case_id not in per_case:
            per_case[event.case_id] = []
            case_order.append(event.case_id)
        per_case[event.case_id].append(event)

    finished: list[Trace] = []
    open_by_case: dict[str, list[Event]] = {}
    dropped = 0
    for case in case_order:
        trace: list[Event] | None = None
        t0 = tn = 0
        splits = 0
        for event in per_case[case]:
            is_start = event.activity in alpha
            if trace is None:
                if is_start:
                    trace = [event]
                    t0 = tn = event.day
                else:
                    dropped += 1
            elif not is_start:
                trace.append(event)
                tn = event.day
            elif event.day - t0 <= d0 or event.day - tn <= dn:
                trace.append(event)
                tn = event.day
            else:
                splits += 1
                finished.append(Trace(f"{case}#{splits}", tuple(trace)))
                trace = [event]
                t0 = tn = event.day
        if trace is not None:
            open_by_case[case] = trace
    for case in case_order:
        if case in open_by_case:
            finished.append(Trace(case, tuple(open_by_case[case])))
    return finished, dropped


def trace_multiset(traces) -> Counter:
    return Counter((t.trace_id, t.events) for t in traces)


def brute_force_dfg(traces) -> dict[tuple[str, str], int]:
    """All-position-pairs scan: count (i, j) with j == i + 1."""
    counts: dict[tuple[str, str], int] = {}
    for trace in traces:
        events = list(trace.events)
        for i in range(len(events)):
            for j in range(len(events)):
                if j == i + 1:
                    key = (events[i].activity, events[j].activity)
                    counts[key] = counts.get(key, 0) + 1
    return counts


def enumerate_cooccurrence(traces_x, traces_y, min_support: float):
    """All rules by direct definition: {(kind, antecedent, consequent): (px, py)}."""
    sets_x = [set(e.activity for e in t.events) for t in traces_x]
    sets_y = [set(e.activity for e in t.events) for t in traces_y]
    labels = sorted(set().union(*sets_x, *sets_y))
    rules = {}
    for x in labels:
        nx = sum(1 for s in sets_x if x in s)
        ny = sum(1 for s in sets_y if x in s)
        sup_x = nx / len(sets_x)
        sup_y = ny / len(sets_y)
        if nx == 0 or ny == 0 or sup_x < min_support or sup_y < min_support:
            continue
        for y in labels:
            if y == x:
                continue
            px = sum(1 for s in sets_x if x in s and y in s) / nx
            py = sum(1 for s in sets_y if x in s and y in s) / ny
            rules[("conditional", x, y)] = (px, py)
    for y in labels:
        px = sum(1 for s in sets_x if y in s) / len(sets_x)
        py = sum(1 for s in sets_y if y in s) / len(sets_y)
        rules[("unconditional", None, y)] = (px, py)
    return rules


def random_sorted_log(
    rng: random.Random,
    max_events: int = 1000,
    max_cases: int = 40,
    labels: str = "ABCDEFG",
    day_span: int = 900,
) -> EventLog:
    """A date-ordered log with clustered case activity and occasional long gaps."""
    n = rng.randint(0, max_events)
    base = 730_000
    events = [
        Event(f"c{rng.randint(1, max_cases)}", rng.choice(labels), base + rng.randint(0, day_span))
        for _ in range(n)
    ]
    events.sort(key=lambda e: e.day)
    return EventLog(events)


def random_trace_set(
    rng: random.Random,
    max_traces: int = 60,
    max_len: int = 8,
    labels: str = "ABCDE",
) -> list[Trace]:
    traces = []
    for i in range(rng.randint(1, max_traces)):
        length = rng.randint(1, max_len)
        base = 730_000 + rng.randint(0, 300)
        events = tuple(
            Event(f"t{i}", rng.choice(labels), base + j) for j in range(length)
        )
        traces.append(Trace(f"t{i}", events))
    return traces
