"""Timestamp-tie repair: reorder events by date, breaking ties by activity.

Day-granular logs record same-day activities in arbitrary order. Imposing a
standard activity order as the tie-breaker standardizes those sequences, so
that logically equivalent same-day traces become identical variants.

The sort is realized by bucketing rather than comparison sorting: one pass
groups events by day (bounded integers), then each bucket is counting-sorted
over the activity ranks. Both passes are linear in the number of events, and
the result is stable for events equal on (date, rank).
"""

from __future__ import annotations

from .errors import UnknownActivityError
from .events import ActivityOrder, DEFAULT_ORDER, Event, EventLog


def repair_log(log: EventLog, order: ActivityOrder = DEFAULT_ORDER) -> EventLog:
    """Return the log sorted by (date, activity rank), stably.

    The output is a permutation of the input events; the per-(case, activity,
    date) multiset is untouched. Every activity in the log must appear in
    ``order``; unknown labels are collected and reported together rather than
    silently ranked.
    """
    events = log.events if isinstance(log, EventLog) else tuple(log)

    unknown = {e.activity for e in events} - set(order.labels)
    if unknown:
        raise UnknownActivityError(unknown)

    by_day: dict[int, list[Event]] = {}
    for event in events:
        bucket = by_day.get(event.day)
        if bucket is None:
            by_day[event.day] = [event]
        else:
            bucket.append(event)

    ranks = {label: i for i, label in enumerate(order.labels)}
    width = len(ranks)
    out: list[Event] = []
    for day in sorted(by_day):
        bucket = by_day[day]
        if len(bucket) == 1:
            out.append(bucket[0])
            continue
        per_rank: list[list[Event]] = [[] for _ in range(width)]
        for event in bucket:
            per_rank[ranks[event.activity]].append(event)
        for chunk in per_rank:
            out.extend(chunk)
    return EventLog(out)
