"""Core domain types: events, logs, traces, and the activity total order.

Dates are stored as proleptic Gregorian ordinals (``datetime.date.toordinal``),
so all time arithmetic is plain integer day differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

from .errors import InvalidConfigError, UnknownActivityError


def day_of(value: date | str) -> int:
    """Convert a date or ISO ``YYYY-MM-DD`` string to a day ordinal."""
    if isinstance(value, date):
        return value.toordinal()
    return date.fromisoformat(value).toordinal()


def day_to_date(day: int) -> date:
    return date.fromordinal(day)


def day_to_iso(day: int) -> str:
    return date.fromordinal(day).isoformat()


def is_valid_label(label: str) -> bool:
    """Activity labels are non-empty tokens without whitespace."""
    return bool(label) and not any(ch.isspace() for ch in label)


class Event(NamedTuple):
    """One recorded activity execution, at day granularity."""

    case_id: str
    activity: str
    day: int

    @property
    def date(self) -> date:
        return date.fromordinal(self.day)

    def __repr__(self) -> str:  # compact, log-friendly
        return f"Event({self.case_id!r}, {self.activity!r}, {day_to_iso(self.day)})"


class ActivityOrder:
    """A total order over activity labels; rank 0 comes first.

    The default order used throughout is alphabetical over the labels A..G,
    but any alphabet of distinct tokens is accepted.
    """

    __slots__ = ("_labels", "_ranks")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise InvalidConfigError("activity order needs at least one label")
        for label in labels:
            if not is_valid_label(label):
                raise InvalidConfigError(f"invalid activity label: {label!r}")
        if len(set(labels)) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise InvalidConfigError(f"duplicate labels in activity order: {', '.join(dupes)}")
        self._labels = labels
        self._ranks = {label: i for i, label in enumerate(labels)}

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def rank(self, label: str) -> int:
        try:
            return self._ranks[label]
        except KeyError:
            raise UnknownActivityError([label]) from None

    def __contains__(self, label: object) -> bool:
        return label in self._ranks

    def __iter__(self) -> Iterator[str]:
        return iter(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ActivityOrder) and self._labels == other._labels

    def __hash__(self) -> int:
        return hash(self._labels)

    def __repr__(self) -> str:
        return f"ActivityOrder({list(self._labels)!r})"


DEFAULT_ORDER = ActivityOrder("ABCDEFG")


def event_sort_key(order: ActivityOrder) -> Callable[[Event], tuple[int, int]]:
    """Key function realizing the (date, activity rank) ordering."""
    ranks = order._ranks

    def key(event: Event) -> tuple[int, int]:
        try:
            return (event.day, ranks[event.activity])
        except KeyError:
            raise UnknownActivityError([event.activity]) from None

    return key


def event_compare(e1: Event, e2: Event, order: ActivityOrder = DEFAULT_ORDER) -> int:
    """Compare two events: -1, 0, or +1.

    Primary key is the date, secondary key the activity rank. Case ids play
    no role, so events of different cases on the same day with the same
    activity compare equal.
    """
    key = event_sort_key(order)
    k1, k2 = key(e1), key(e2)
    if k1 < k2:
        return -1
    if k1 > k2:
        return 1
    return 0


class EventLog(Sequence[Event]):
    """An immutable sequence of events.

    Date ordering is an invariant of *repaired* logs, not raw parses; use
    :meth:`is_date_ordered` to check and ``careflow.repair`` to establish it.
    """

    __slots__ = ("_events",)

    def __init__(self, events: Iterable[Event] = ()):
        self._events = events if isinstance(events, tuple) else tuple(events)

    @property
    def events(self) -> tuple[Event, ...]:
        return self._events

    def __len__(self) -> int:
        return len(self._events)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return EventLog(self._events[index])
        return self._events[index]

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EventLog) and self._events == other._events

    def __hash__(self) -> int:
        return hash(self._events)

    def __repr__(self) -> str:
        return f"EventLog({len(self._events)} events)"

    def is_date_ordered(self) -> bool:
        events = self._events
        return all(events[i].day <= events[i + 1].day for i in range(len(events) - 1))

    def activities(self) -> set[str]:
        return {e.activity for e in self._events}

    def case_ids(self) -> set[str]:
        return {e.case_id for e in self._events}


@dataclass(frozen=True, slots=True)
class Trace:
    """The event sequence of one bounded process instance.

    ``trace_id`` is either a raw case id or a generated id from segmentation;
    the events keep their original case ids.
    """

    trace_id: str
    events: tuple[Event, ...]

    @property
    def activities(self) -> tuple[str, ...]:
        """The variant key: the bare activity sequence, dates ignored."""
        return tuple(e.activity for e in self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)
