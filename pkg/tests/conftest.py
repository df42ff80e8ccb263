"""Shared test helpers: compact constructors for events, logs, and traces."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from careflow import Event, EventLog, Trace, day_of


def ev(case_id: str, activity: str, day: str | int) -> Event:
    return Event(case_id, activity, day if isinstance(day, int) else day_of(day))


def mklog(*specs: tuple[str, str, str | int]) -> EventLog:
    return EventLog([ev(*spec) for spec in specs])


def mktrace(trace_id: str, activities: str | list[str], start: str = "2020-03-01") -> Trace:
    """Trace with the given activity sequence, one day apart from ``start``."""
    labels = list(activities) if isinstance(activities, str) else activities
    base = day_of(start)
    return Trace(trace_id, tuple(Event(trace_id, a, base + i) for i, a in enumerate(labels)))


@pytest.fixture
def three_trace_fixture() -> list[Trace]:
    """The worked stats example: two <A> traces and one <A,B>."""
    return [mktrace("t1", "A"), mktrace("t2", "A"), mktrace("t3", "AB")]
