"""Per-log analytics: summary statistics, directly-follows matrices, variant
rankings, temporal histograms, and relative activity frequencies.

A *variant* is the bare activity sequence of a trace; two traces with the
same variant are duplicates regardless of dates or ids.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Sequence

from .errors import EmptyLogError, InvalidConfigError, UnknownActivityError
from .events import ActivityOrder, EventLog, Trace
from .ingest import PeriodWindow

#: Bucket kinds accepted by :func:`temporal_histogram`.
BUCKET_KINDS = ("month", "fortnight")

FORTNIGHT_DAYS = 14


def percentage(part: float, whole: float) -> float:
    """``100 * part / whole``, or 0.0 for an empty whole."""
    return 100.0 * part / whole if whole else 0.0


@dataclass(frozen=True)
class LogStats:
    """Headline characteristics of a segmented log."""

    total_traces: int
    distinct_traces: int
    distinct_pct: float
    total_events: int
    distinct_activities: int
    filtered_events: int
    filtered_pct: float
    min_len: int
    avg_len: float
    max_len: int

    def to_dict(self) -> dict:
        """Field-for-field dict; percentages and the average length are
        rounded to one decimal for reporting, exact values stay on the
        object."""
        return {
            "total_traces": self.total_traces,
            "distinct_traces": self.distinct_traces,
            "distinct_pct": round(self.distinct_pct, 1),
            "total_events": self.total_events,
            "distinct_activities": self.distinct_activities,
            "filtered_events": self.filtered_events,
            "filtered_pct": round(self.filtered_pct, 1),
            "min_len": self.min_len,
            "avg_len": round(self.avg_len, 1),
            "max_len": self.max_len,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def compute_stats(traces: Sequence[Trace], dropped_events: int = 0) -> LogStats:
    """Summarize a trace set; ``dropped_events`` feeds the filtered columns.

    ``distinct_traces`` counts unique variants. ``filtered_pct`` is the
    fraction of the original input that was dropped, i.e.
    ``100 * dropped / (dropped + kept events)``.
    """
    lengths = [len(t.events) for t in traces]
    total_traces = len(lengths)
    total_events = sum(lengths)
    variants = {t.activities for t in traces}
    activities = {e.activity for t in traces for e in t.events}
    return LogStats(
        total_traces=total_traces,
        distinct_traces=len(variants),
        distinct_pct=percentage(len(variants), total_traces),
        total_events=total_events,
        distinct_activities=len(activities),
        filtered_events=dropped_events,
        filtered_pct=percentage(dropped_events, dropped_events + total_events),
        min_len=min(lengths) if lengths else 0,
        avg_len=total_events / total_traces if total_traces else 0.0,
        max_len=max(lengths) if lengths else 0,
    )


@dataclass(frozen=True)
class DFGMatrix:
    """Directly-follows counts as a square matrix over ``labels``."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def count(self, source: str, target: str) -> int:
        try:
            i = self.labels.index(source)
            j = self.labels.index(target)
        except ValueError:
            return 0
        return self.counts[i][j]

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def to_csv(self) -> str:
        """Matrix layout: header row and column of labels, integer cells."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["activity", *self.labels])
        for label, row in zip(self.labels, self.counts):
            writer.writerow([label, *row])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": [list(r) for r in self.counts]}


def compute_dfg(traces: Iterable[Trace], order: ActivityOrder | None = None) -> DFGMatrix:
    """Count directly-follows relations between adjacent events of each trace.

    Nodes are the activities observed in the traces. With ``order`` given the
    matrix follows its ranking (all observed labels must be in it); otherwise
    labels are sorted lexicographically.
    """
    pair_counts: Counter[tuple[str, str]] = Counter()
    observed: set[str] = set()
    for trace in traces:
        acts = [e.activity for e in trace.events]
        observed.update(acts)
        pair_counts.update(zip(acts, acts[1:]))

    if order is not None:
        unknown = observed - set(order.labels)
        if unknown:
            raise UnknownActivityError(unknown)
        labels = tuple(sorted(observed, key=order.rank))
    else:
        labels = tuple(sorted(observed))
    matrix = tuple(
        tuple(pair_counts.get((source, target), 0) for target in labels) for source in labels
    )
    return DFGMatrix(labels, matrix)


@dataclass(frozen=True)
class VariantRanking:
    """Variants with frequencies, most frequent first; ties break on the
    activity sequence."""

    entries: tuple[tuple[tuple[str, ...], int], ...]

    def render_lines(self) -> list[str]:
        return [f"⟨{','.join(variant)}⟩ {freq}" for variant, freq in self.entries]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["variant", "frequency"])
        for variant, freq in self.entries:
            writer.writerow([",".join(variant), freq])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {
            "entries": [{"variant": list(v), "frequency": f} for v, f in self.entries]
        }


def variant_counts(traces: Iterable[Trace]) -> Counter[tuple[str, ...]]:
    return Counter(t.activities for t in traces)


def top_k_variants(traces: Iterable[Trace], k: int) -> VariantRanking:
    """The ``k`` most frequent variants, frequency descending then sequence
    ascending."""
    if k < 1:
        raise InvalidConfigError(f"k must be >= 1, got {k}")
    counts = variant_counts(traces)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return VariantRanking(tuple(ranked[:k]))


@dataclass(frozen=True)
class TemporalHistogram:
    """Counts of one activity over time buckets inside a period window."""

    activity: str
    bucket_kind: str
    buckets: tuple[tuple[date, int], ...]

    def total(self) -> int:
        return sum(count for _, count in self.buckets)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["bucket_start", "count"])
        for start, count in self.buckets:
            writer.writerow([start.isoformat(), count])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {
            "activity": self.activity,
            "bucket_kind": self.bucket_kind,
            "buckets": [{"bucket_start": s.isoformat(), "count": c} for s, c in self.buckets],
        }


def temporal_histogram(
    log: EventLog,
    activity: str,
    bucket_kind: str,
    window: PeriodWindow,
) -> TemporalHistogram:
    """Bucketed counts of one activity within a window.

    Month buckets are calendar months; fortnight buckets are consecutive
    14-day spans anchored at the window start (the last one may be short).
    Buckets cover the whole window, so an absent activity yields all zeros.
    """
    if bucket_kind not in BUCKET_KINDS:
        raise InvalidConfigError(f"bucket kind must be one of {BUCKET_KINDS}, got {bucket_kind!r}")

    start_day = window.start_day
    end_day = window.end_day
    if bucket_kind == "month":
        starts = [date(window.year, month, 1) for month in range(window.start[0], window.end[0] + 1)]

        def bucket_index(day: int) -> int:
            return date.fromordinal(day).month - window.start[0]

    else:
        count = (end_day - start_day) // FORTNIGHT_DAYS + 1
        starts = [date.fromordinal(start_day + i * FORTNIGHT_DAYS) for i in range(count)]

        def bucket_index(day: int) -> int:
            return (day - start_day) // FORTNIGHT_DAYS

    counts = [0] * len(starts)
    for event in log:
        if event.activity == activity and start_day <= event.day <= end_day:
            counts[bucket_index(event.day)] += 1
    return TemporalHistogram(activity, bucket_kind, tuple(zip(starts, counts)))


def activity_counts(log: EventLog) -> Counter[str]:
    """Absolute event counts per activity."""
    return Counter(e.activity for e in log)


def relative_frequencies(log: EventLog) -> dict[str, float]:
    """Per-activity share of all events, as percentages summing to 100."""
    if not len(log):
        raise EmptyLogError("relative frequencies need a non-empty log")
    counts = activity_counts(log)
    total = len(log)
    return {label: 100.0 * counts[label] / total for label in sorted(counts)}
