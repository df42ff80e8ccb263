"""Segmentation of unbounded process instances into bounded traces.

Cases like a patient's GP history have no natural start or end event. The
segmenter walks a date-ordered log once and cuts each case into traces: a
configured start activity opens a trace, later events append to it, and a new
start activity splits off a fresh trace when it is too far both from the
trace's first event (more than ``delta0_days``) and from its last event
(more than ``delta_n_days``). Events of cases that never saw a start
activity are dropped and counted.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import InvalidConfigError, UnsortedLogError
from .events import Event, EventLog, Trace

#: Separator between a raw case id and the split counter in generated ids.
#: Raw case ids must not contain it (enforced at ingestion and at trace open).
TRACE_ID_SEPARATOR = "#"


@dataclass(frozen=True)
class SegmentationConfig:
    """Start-activity set and the two day thresholds.

    Defaults: start set {A}, 180 days from the trace's first event, 30 days
    from its last. ``delta0_days >= delta_n_days`` is typical but not
    required; both comparisons are inclusive.
    """

    start_activities: frozenset[str] = frozenset({"A"})
    delta0_days: int = 180
    delta_n_days: int = 30

    def __post_init__(self):
        if not self.start_activities:
            raise InvalidConfigError("start activity set must not be empty")
        if self.delta0_days < 0 or self.delta_n_days < 0:
            raise InvalidConfigError("day thresholds must be non-negative")


@dataclass
class SegmentationState:
    """Per-pass bookkeeping: open trace, first-start day, and last-seen day
    per case id. The three maps always share the same key set."""

    trace_map: dict[str, list[Event]] = field(default_factory=dict)
    first_start: dict[str, int] = field(default_factory=dict)
    last_seen: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class SegmentationResult:
    """Traces plus accounting for the events that were dropped."""

    traces: tuple[Trace, ...]
    dropped_events: int

    @property
    def total_events(self) -> int:
        return sum(len(t.events) for t in self.traces)

    @property
    def input_events(self) -> int:
        return self.total_events + self.dropped_events

    @property
    def dropped_fraction(self) -> float:
        total = self.input_events
        return self.dropped_events / total if total else 0.0

    def report_dict(self) -> dict:
        return {
            "traces": len(self.traces),
            "events": self.total_events,
            "dropped_events": self.dropped_events,
            "dropped_fraction": round(self.dropped_fraction, 6),
        }


def generate_trace_id(base_case_id: str, counter: int) -> str:
    """Derive the archive id for the ``counter``-th split of a case.

    Injective over (base, counter) and collision-free against raw ids as
    long as raw ids never contain the separator.
    """
    return f"{base_case_id}{TRACE_ID_SEPARATOR}{counter}"


def segment(log: EventLog, config: SegmentationConfig = SegmentationConfig()) -> SegmentationResult:
    """Cut a date-ordered log into bounded traces, single forward pass.

    For each event, exactly one of:

    * case unseen and activity is a start activity: open a new trace;
    * case open and activity is not a start activity: append;
    * case open, start activity, within ``delta0_days`` of the trace's first
      event or ``delta_n_days`` of its last (inclusive): append;
    * case open, start activity, outside both: archive the open trace under
      a generated id and open a fresh trace for the case;
    * case unseen and activity is not a start activity: drop and count.

    Still-open traces are emitted at end of input under their raw case ids,
    after the archived ones. Raises ``UnsortedLogError`` on any date
    regression (repair the log first).
    """
    alpha = config.start_activities
    delta0 = config.delta0_days
    delta_n = config.delta_n_days

    # one record per case: [open events, first-start day, last-seen day,
    # split count] -- a single dict access per event keeps the pass linear
    # at millions of events
    records: dict[str, list] = {}
    finished: list[Trace] = []
    dropped = 0
    prev_day = None

    for event in log:
        case_id = event.case_id
        activity = event.activity
        day = event.day
        if prev_day is not None and day < prev_day:
            raise UnsortedLogError(
                f"date regression at {event!r}; segment requires a date-ordered log"
            )
        prev_day = day

        record = records.get(case_id)
        if record is None:
            if activity in alpha:
                if TRACE_ID_SEPARATOR in case_id:
                    raise InvalidConfigError(
                        f"case id {case_id!r} contains the reserved separator "
                        f"{TRACE_ID_SEPARATOR!r}"
                    )
                records[case_id] = [[event], day, day, 0]
            else:
                dropped += 1
        elif activity not in alpha:
            record[0].append(event)
            record[2] = day
        elif day - record[1] <= delta0 or day - record[2] <= delta_n:
            record[0].append(event)
            record[2] = day
        else:
            count = record[3] + 1
            finished.append(Trace(generate_trace_id(case_id, count), tuple(record[0])))
            record[0] = [event]
            record[1] = day
            record[2] = day
            record[3] = count

    for case_id, record in records.items():
        finished.append(Trace(case_id, tuple(record[0])))
    return SegmentationResult(tuple(finished), dropped)


def split_trace_id(trace_id: str) -> tuple[str, int | None]:
    """Invert the id scheme: (base case id, split counter or None)."""
    base, sep, suffix = trace_id.rpartition(TRACE_ID_SEPARATOR)
    if not sep:
        return trace_id, None
    return base, int(suffix)


def check_partition(log: EventLog, result: SegmentationResult) -> None:
    """Every input event lands in exactly one trace or the dropped count."""
    kept = result.total_events
    if kept + result.dropped_events != len(log):
        raise ValueError(
            f"partition violated: {kept} kept + {result.dropped_events} dropped "
            f"!= {len(log)} input events"
        )
    log_counts = Counter(log)
    for trace in result.traces:
        for event in trace.events:
            log_counts[event] -= 1
            if log_counts[event] < 0:
                raise ValueError(f"partition violated: {event!r} not available in the input")


def check_boundaries(result: SegmentationResult, config: SegmentationConfig) -> None:
    """Every trace is non-empty and opens with a start activity."""
    for trace in result.traces:
        if not trace.events:
            raise ValueError(f"boundary violated: trace {trace.trace_id!r} is empty")
        if trace.events[0].activity not in config.start_activities:
            raise ValueError(
                f"boundary violated: trace {trace.trace_id!r} opens with "
                f"{trace.events[0].activity!r}"
            )


def check_thresholds(result: SegmentationResult, config: SegmentationConfig) -> None:
    """Appends were within threshold; archives were outside both thresholds.

    Recomputed purely from the output traces and the id scheme, independent
    of the builder's internal state.
    """
    alpha = config.start_activities
    delta0 = config.delta0_days
    delta_n = config.delta_n_days

    by_case: dict[str, list[tuple[int, Trace]]] = {}
    for trace in result.traces:
        base, counter = split_trace_id(trace.trace_id)
        # the still-open trace (no counter) is the last of its case
        key = counter if counter is not None else 1 << 62
        by_case.setdefault(base, []).append((key, trace))

    for base, keyed in by_case.items():
        keyed.sort(key=lambda kv: kv[0])
        previous: Trace | None = None
        for _, trace in keyed:
            first_day = trace.events[0].day
            prev_day = first_day
            for event in trace.events[1:]:
                if event.activity in alpha:
                    if event.day - first_day > delta0 and event.day - prev_day > delta_n:
                        raise ValueError(
                            f"threshold violated: {event!r} appended to trace "
                            f"{trace.trace_id!r} outside both thresholds"
                        )
                prev_day = event.day
            if previous is not None:
                gap0 = first_day - previous.events[0].day
                gap_n = first_day - previous.events[-1].day
                if gap0 <= delta0 or gap_n <= delta_n:
                    raise ValueError(
                        f"threshold violated: trace {trace.trace_id!r} split from "
                        f"{previous.trace_id!r} although within thresholds "
                        f"(gap0={gap0}, gap_n={gap_n})"
                    )
            previous = trace
