"""Event-log ingestion and serialization: CSV, a minimal XES subset, the
trace-per-line text format, and calendar period filtering.

CSV parsing is a single streaming pass; memory is proportional to the
accepted events, never to the raw text. XES output is byte-deterministic:
fixed attribute order (name before timestamp), two-space indentation, UTF-8,
LF line endings.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import IO, Iterable, Iterator, Union
from xml.etree import ElementTree
from xml.sax.saxutils import escape

from .errors import CsvFormatError, InvalidConfigError, RejectThresholdError, XesFormatError
from .events import Event, EventLog, Trace, day_to_iso, is_valid_label

#: Generated trace ids use this separator; raw case ids must not contain it,
#: so rows carrying it are rejected at ingestion.
RESERVED_ID_SEPARATOR = "#"

Source = Union[str, Path, IO[str], IO[bytes]]

_ISO_DATE_FORMAT = "%Y-%m-%d"


@dataclass(frozen=True)
class CsvSchema:
    """Column layout of a CSV event log.

    The canonical layout is ``case_id,activity,date`` with ISO dates and a
    header row. When ``has_header`` is false the three columns are taken
    positionally in that order.
    """

    case_column: str = "case_id"
    activity_column: str = "activity"
    date_column: str = "date"
    date_format: str = _ISO_DATE_FORMAT
    delimiter: str = ","
    has_header: bool = True

    def __post_init__(self):
        names = (self.case_column, self.activity_column, self.date_column)
        if len(set(names)) != 3:
            raise InvalidConfigError(f"CSV schema columns must be distinct, got {names}")
        if len(self.delimiter) != 1:
            raise InvalidConfigError("CSV delimiter must be a single character")


CANONICAL_SCHEMA = CsvSchema()


@dataclass(frozen=True)
class PeriodWindow:
    """A within-year calendar window, bounds inclusive.

    Defaults to March 1 .. November 30, the nine-month observation window
    used for year-over-year comparisons.
    """

    year: int
    start: tuple[int, int] = (3, 1)
    end: tuple[int, int] = (11, 30)

    def __post_init__(self):
        try:
            start = date(self.year, *self.start)
            end = date(self.year, *self.end)
        except ValueError as exc:
            raise InvalidConfigError(f"invalid period window: {exc}") from None
        if start > end:
            raise InvalidConfigError("period window start is after its end")

    @property
    def start_date(self) -> date:
        return date(self.year, *self.start)

    @property
    def end_date(self) -> date:
        return date(self.year, *self.end)

    @property
    def start_day(self) -> int:
        return self.start_date.toordinal()

    @property
    def end_day(self) -> int:
        return self.end_date.toordinal()

    def contains_day(self, day: int) -> bool:
        return self.start_day <= day <= self.end_day

    @classmethod
    def parse(cls, text: str) -> "PeriodWindow":
        """Parse ``YEAR`` or ``YEAR:MM-DD:MM-DD`` (e.g. ``2020:03-01:11-30``)."""
        parts = text.split(":")
        try:
            if len(parts) == 1:
                return cls(int(parts[0]))
            if len(parts) == 3:
                year = int(parts[0])
                sm, sd = (int(x) for x in parts[1].split("-"))
                em, ed = (int(x) for x in parts[2].split("-"))
                return cls(year, (sm, sd), (em, ed))
        except (ValueError, TypeError):
            pass
        raise InvalidConfigError(f"cannot parse period window {text!r}; expected YEAR[:MM-DD:MM-DD]")


@dataclass
class ParseReport:
    """Row accounting for one CSV parse."""

    rows_read: int = 0
    rows_accepted: int = 0
    rejects: dict[str, int] = field(default_factory=dict)

    @property
    def rows_rejected(self) -> int:
        return sum(self.rejects.values())

    def reject(self, reason: str) -> None:
        self.rejects[reason] = self.rejects.get(reason, 0) + 1

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_accepted": self.rows_accepted,
            "rows_rejected": self.rows_rejected,
            "reject_reasons": dict(sorted(self.rejects.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _open_text(source: Source, for_write: bool = False):
    """Adapt a path or stream to text mode; returns (stream, cleanup)."""
    if isinstance(source, (str, Path)):
        mode = "w" if for_write else "r"
        stream = open(source, mode, encoding="utf-8", newline="")
        return stream, stream.close
    if isinstance(source, io.TextIOBase) or hasattr(source, "encoding"):
        return source, (source.flush if for_write else (lambda: None))
    wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
    # detach so the caller's binary stream survives the wrapper
    return wrapper, wrapper.detach


def parse_csv(
    source: Source,
    schema: CsvSchema = CANONICAL_SCHEMA,
    *,
    max_reject_fraction: float = 0.01,
) -> tuple[EventLog, ParseReport]:
    """Stream a CSV event log into an ``EventLog``, preserving row order.

    Bad rows (missing field, unparseable date, invalid activity token, case
    id containing the reserved ``#`` separator) are counted per reason and
    skipped; the parse fails only when the reject fraction exceeds
    ``max_reject_fraction``. No ordering is imposed here: raw input order is
    kept for the repair stage.
    """
    stream, cleanup = _open_text(source)
    report = ParseReport()
    events: list[Event] = []
    iso_dates = schema.date_format == _ISO_DATE_FORMAT
    day_cache: dict[str, int] = {}

    try:
        reader = csv.reader(stream, delimiter=schema.delimiter)
        if schema.has_header:
            try:
                header = next(reader)
            except StopIteration:
                raise CsvFormatError("CSV source is empty (no header row)") from None
            positions = {name: i for i, name in enumerate(header)}
            missing = [
                c
                for c in (schema.case_column, schema.activity_column, schema.date_column)
                if c not in positions
            ]
            if missing:
                raise CsvFormatError(f"CSV header is missing columns: {', '.join(missing)}")
            case_ix = positions[schema.case_column]
            act_ix = positions[schema.activity_column]
            date_ix = positions[schema.date_column]
        else:
            case_ix, act_ix, date_ix = 0, 1, 2
        width = max(case_ix, act_ix, date_ix) + 1

        for row in reader:
            if not row:
                continue
            report.rows_read += 1
            if len(row) < width:
                report.reject("missing-field")
                continue
            case_id = row[case_ix]
            activity = row[act_ix]
            raw_date = row[date_ix]
            if not case_id or not activity or not raw_date:
                report.reject("missing-field")
                continue
            if RESERVED_ID_SEPARATOR in case_id:
                report.reject("reserved-case-id")
                continue
            if not is_valid_label(activity):
                report.reject("bad-activity")
                continue
            day = day_cache.get(raw_date)
            if day is None:
                try:
                    if iso_dates:
                        day = date.fromisoformat(raw_date).toordinal()
                    else:
                        day = datetime.strptime(raw_date, schema.date_format).date().toordinal()
                except ValueError:
                    report.reject("bad-date")
                    continue
                day_cache[raw_date] = day
            events.append(Event(case_id, activity, day))
            report.rows_accepted += 1
    finally:
        cleanup()

    if report.rows_read and report.rows_rejected / report.rows_read > max_reject_fraction:
        raise RejectThresholdError(
            f"rejected {report.rows_rejected} of {report.rows_read} rows "
            f"(limit {max_reject_fraction:.2%}): {report.to_json()}"
        )
    return EventLog(events), report


def write_csv(
    events: Iterable[Event],
    sink: Source,
    schema: CsvSchema = CANONICAL_SCHEMA,
) -> int:
    """Write events as CSV under ``schema``; returns the byte count.

    The inverse of :func:`parse_csv` for the canonical schema: deterministic
    column order (case, activity, date) and LF line endings.
    """
    stream, cleanup = _open_text(sink, for_write=True)
    iso_dates = schema.date_format == _ISO_DATE_FORMAT
    day_cache: dict[int, str] = {}

    def render_day(day: int) -> str:
        text = day_cache.get(day)
        if text is None:
            d = date.fromordinal(day)
            text = d.isoformat() if iso_dates else d.strftime(schema.date_format)
            day_cache[day] = text
        return text

    counter = _CountingWriter(stream)
    writer = csv.writer(counter, delimiter=schema.delimiter, lineterminator="\n")
    try:
        if schema.has_header:
            writer.writerow([schema.case_column, schema.activity_column, schema.date_column])
        writer.writerows((e.case_id, e.activity, render_day(e.day)) for e in events)
    finally:
        cleanup()
    return counter.bytes_written


class _CountingWriter:
    """Text-stream shim that counts encoded bytes as it forwards writes."""

    __slots__ = ("_stream", "bytes_written")

    def __init__(self, stream):
        self._stream = stream
        self.bytes_written = 0

    def write(self, text: str) -> int:
        self.bytes_written += len(text.encode("utf-8"))
        return self._stream.write(text)


def _xml_attr(value: str) -> str:
    return escape(value, {'"': "&quot;"})


def _group_log_as_traces(log: EventLog) -> Iterator[Trace]:
    """One trace per case id, cases in first-appearance order."""
    grouped: dict[str, list[Event]] = {}
    for event in log:
        grouped.setdefault(event.case_id, []).append(event)
    for case_id, case_events in grouped.items():
        yield Trace(case_id, tuple(case_events))


def write_xes(log_or_traces: EventLog | Iterable[Trace], sink: Source) -> int:
    """Serialize a log or trace sequence as a minimal XES document.

    Emits only the standard name and timestamp attributes; timestamps are
    rendered at midnight UTC. Given a raw ``EventLog``, one trace is written
    per case id in first-appearance order. Returns the byte count.
    """
    if isinstance(log_or_traces, EventLog):
        traces: Iterable[Trace] = _group_log_as_traces(log_or_traces)
    else:
        traces = log_or_traces

    stamp_cache: dict[int, str] = {}

    def stamp(day: int) -> str:
        text = stamp_cache.get(day)
        if text is None:
            text = f"{day_to_iso(day)}T00:00:00+00:00"
            stamp_cache[day] = text
        return text

    stream, cleanup = _open_text(sink, for_write=True)
    counter = _CountingWriter(stream)
    try:
        counter.write('<?xml version="1.0" encoding="UTF-8"?>\n')
        counter.write('<log xes.version="1.0" xes.features="">\n')
        for trace in traces:
            counter.write("  <trace>\n")
            counter.write(f'    <string key="concept:name" value="{_xml_attr(trace.trace_id)}"/>\n')
            for event in trace.events:
                counter.write(
                    "    <event>\n"
                    f'      <string key="concept:name" value="{_xml_attr(event.activity)}"/>\n'
                    f'      <date key="time:timestamp" value="{stamp(event.day)}"/>\n'
                    "    </event>\n"
                )
            counter.write("  </trace>\n")
        counter.write("</log>\n")
    finally:
        cleanup()
    return counter.bytes_written


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_xes_timestamp(value: str) -> int:
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(text).date().toordinal()
    except ValueError:
        pass
    try:
        return date.fromisoformat(text[:10]).toordinal()
    except ValueError:
        raise XesFormatError(f"cannot parse XES timestamp {value!r}") from None


def read_xes(source: Source) -> list[Trace]:
    """Read traces from an XES document, truncating timestamps to days.

    Only the standard name and timestamp attributes are interpreted; all
    other attributes and extensions are ignored. Raises ``XesFormatError``
    when an event lacks either required attribute.
    """
    if isinstance(source, (str, Path)):
        stream: IO = open(source, "rb")
        should_close = True
    else:
        stream, should_close = source, False

    traces: list[Trace] = []
    trace_name: str | None = None
    trace_events: list[tuple[str | None, int | None]] = []
    in_event = False
    event_name: str | None = None
    event_day: int | None = None
    depth_in_trace = False

    try:
        for action, elem in ElementTree.iterparse(stream, events=("start", "end")):
            tag = _local_name(elem.tag)
            if action == "start":
                if tag == "trace":
                    depth_in_trace = True
                    trace_name = None
                    trace_events = []
                elif tag == "event":
                    in_event = True
                    event_name = None
                    event_day = None
                continue
            # end events
            if tag == "event":
                trace_events.append((event_name, event_day))
                in_event = False
                elem.clear()
            elif tag == "trace":
                trace_id = trace_name if trace_name is not None else f"trace-{len(traces) + 1}"
                events = []
                for i, (name, day) in enumerate(trace_events):
                    if name is None:
                        raise XesFormatError(
                            f"event {i + 1} in trace {trace_id!r} has no concept:name"
                        )
                    if day is None:
                        raise XesFormatError(
                            f"event {i + 1} in trace {trace_id!r} has no time:timestamp"
                        )
                    events.append(Event(trace_id, name, day))
                traces.append(Trace(trace_id, tuple(events)))
                depth_in_trace = False
                elem.clear()
            elif depth_in_trace:
                key = elem.get("key")
                value = elem.get("value")
                if key == "concept:name" and value is not None:
                    if in_event:
                        event_name = value
                    else:
                        trace_name = value
                elif key == "time:timestamp" and value is not None and in_event:
                    event_day = _parse_xes_timestamp(value)
    except ElementTree.ParseError as exc:
        raise XesFormatError(f"malformed XES document: {exc}") from None
    finally:
        if should_close:
            stream.close()
    return traces


def write_trace_text(traces: Iterable[Trace], sink: Source) -> int:
    """Write the line format ``trace_id: A,C,A`` (dates are not carried)."""
    stream, cleanup = _open_text(sink, for_write=True)
    counter = _CountingWriter(stream)
    try:
        for trace in traces:
            counter.write(f"{trace.trace_id}: {','.join(trace.activities)}\n")
    finally:
        cleanup()
    return counter.bytes_written


def read_trace_text(source: Source) -> list[Trace]:
    """Read the ``trace_id: A,C,A`` line format.

    The format carries no dates, so events get a fixed placeholder day;
    date-based analytics need CSV or XES input instead.
    """
    stream, cleanup = _open_text(source)
    traces: list[Trace] = []
    try:
        for lineno, line in enumerate(stream, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            trace_id, sep, acts = line.partition(": ")
            if not sep or not trace_id:
                raise CsvFormatError(f"bad trace line {lineno}: {line!r}")
            labels = acts.split(",") if acts else []
            if not all(is_valid_label(l) for l in labels):
                raise CsvFormatError(f"bad activity token on trace line {lineno}: {line!r}")
            traces.append(Trace(trace_id, tuple(Event(trace_id, l, 1) for l in labels)))
    finally:
        cleanup()
    return traces


def filter_period(log: EventLog, window: PeriodWindow) -> EventLog:
    """Keep exactly the events inside the window, preserving relative order."""
    lo, hi = window.start_day, window.end_day
    return EventLog([e for e in log if lo <= e.day <= hi])
