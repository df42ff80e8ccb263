"""CSV parsing, XES round-trips, period filtering, trace text format."""

import io
import random

import pytest

from careflow import (
    CsvFormatError,
    CsvSchema,
    EventLog,
    InvalidConfigError,
    PeriodWindow,
    RejectThresholdError,
    Trace,
    XesFormatError,
    day_of,
    filter_period,
    parse_csv,
    read_trace_text,
    read_xes,
    write_csv,
    write_trace_text,
    write_xes,
)
from conftest import ev, mklog, mktrace

CLEAN_CSV = "case,act,date\np1,A,2020-03-01\np1,B,2020-03-01\np2,A,2020-03-02\n"
SCHEMA = CsvSchema(case_column="case", activity_column="act", date_column="date")


def parse_text(text, schema=SCHEMA, **kwargs):
    return parse_csv(io.StringIO(text), schema, **kwargs)


class TestParseCsv:
    def test_clean_three_rows(self):
        log, report = parse_text(CLEAN_CSV)
        assert len(log) == 3
        assert report.rows_rejected == 0
        assert log[0] == ev("p1", "A", "2020-03-01")
        assert log[2] == ev("p2", "A", "2020-03-02")

    def test_invalid_month_is_rejected_not_fatal(self):
        text = CLEAN_CSV.replace("2020-03-02", "2020-13-01")
        log, report = parse_text(text, max_reject_fraction=0.5)
        assert len(log) == 2
        assert report.rejects == {"bad-date": 1}

    def test_header_only_file(self):
        log, report = parse_text("case,act,date\n")
        assert len(log) == 0 and report.rows_read == 0

    def test_missing_header_column_names_it(self):
        with pytest.raises(CsvFormatError, match="date"):
            parse_text("case,act\np1,A\n")

    def test_missing_field_rejected(self):
        log, report = parse_text("case,act,date\np1,A\n", max_reject_fraction=1.0)
        assert len(log) == 0 and report.rejects == {"missing-field": 1}

    def test_reserved_separator_in_case_id_rejected(self):
        log, report = parse_text(
            "case,act,date\np1#1,A,2020-03-01\n", max_reject_fraction=1.0
        )
        assert len(log) == 0 and report.rejects == {"reserved-case-id": 1}

    def test_whitespace_activity_rejected(self):
        log, report = parse_text(
            'case,act,date\np1,"A B",2020-03-01\n', max_reject_fraction=1.0
        )
        assert report.rejects == {"bad-activity": 1}

    def test_reject_threshold_enforced(self):
        text = "case,act,date\n" + "p1,A,bad\n" * 5 + "p1,A,2020-01-01\n" * 5
        with pytest.raises(RejectThresholdError):
            parse_text(text, max_reject_fraction=0.25)
        log, _ = parse_text(text, max_reject_fraction=0.5)
        assert len(log) == 5

    def test_raw_order_preserved(self):
        # later date first: the parser must not sort
        log, _ = parse_text("case,act,date\np1,B,2020-03-05\np1,A,2020-03-01\n")
        assert [e.activity for e in log] == ["B", "A"]

    def test_no_header_positional(self):
        schema = CsvSchema(has_header=False)
        log, _ = parse_csv(io.StringIO("p1,A,2020-03-01\n"), schema)
        assert log[0] == ev("p1", "A", "2020-03-01")

    def test_custom_delimiter_and_date_format(self):
        schema = CsvSchema(
            case_column="case",
            activity_column="act",
            date_column="date",
            delimiter=";",
            date_format="%d/%m/%Y",
        )
        log, _ = parse_csv(io.StringIO("case;act;date\np1;A;01/03/2020\n"), schema)
        assert log[0].day == day_of("2020-03-01")

    def test_bytes_source(self):
        log, _ = parse_csv(io.BytesIO(CLEAN_CSV.encode()), SCHEMA)
        assert len(log) == 3

    def test_empty_source_raises(self):
        with pytest.raises(CsvFormatError, match="empty"):
            parse_text("")

    def test_schema_validation(self):
        with pytest.raises(InvalidConfigError):
            CsvSchema(case_column="x", activity_column="x", date_column="date")
        with pytest.raises(InvalidConfigError):
            CsvSchema(delimiter=",,")

    def test_report_json_shape(self):
        _, report = parse_text(CLEAN_CSV)
        assert '"rows_read": 3' in report.to_json()


class TestCsvRoundTrip:
    def test_write_then_parse_is_identity(self):
        log = mklog(
            ("p1", "A", "2020-03-01"),
            ("p2", "G", "2020-03-01"),
            ("p1", "B", "2020-04-11"),
        )
        buf = io.StringIO()
        write_csv(log, buf)
        parsed, report = parse_csv(io.StringIO(buf.getvalue()))
        assert parsed == log and report.rows_rejected == 0

    def test_randomized_round_trips(self):
        rng = random.Random(11)
        for _ in range(25):
            events = [
                ev(f"c{rng.randint(1, 9)}", rng.choice("ABCDEFG"), 737000 + rng.randint(0, 400))
                for _ in range(rng.randint(0, 60))
            ]
            log = EventLog(events)
            buf = io.StringIO()
            write_csv(log, buf)
            assert parse_csv(io.StringIO(buf.getvalue()))[0] == log

    def test_byte_count_matches(self):
        buf = io.StringIO()
        n = write_csv(mklog(("p1", "A", "2020-03-01")), buf)
        assert n == len(buf.getvalue().encode())


EXPECTED_SINGLE_EVENT_XES = """\
<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0" xes.features="">
  <trace>
    <string key="concept:name" value="p1"/>
    <event>
      <string key="concept:name" value="A"/>
      <date key="time:timestamp" value="2020-03-01T00:00:00+00:00"/>
    </event>
  </trace>
</log>
"""


def trace_shape(traces):
    """Round-trip comparison key: id plus (activity, day) sequence."""
    return sorted((t.trace_id, tuple((e.activity, e.day) for e in t.events)) for t in traces)


class TestXes:
    def test_empty_log(self):
        buf = io.BytesIO()
        write_xes(EventLog(), buf)
        text = buf.getvalue().decode()
        assert "<log" in text and "<trace>" not in text

    def test_single_event_document(self):
        buf = io.BytesIO()
        n = write_xes([mktrace("p1", "A")], buf)
        assert buf.getvalue().decode() == EXPECTED_SINGLE_EVENT_XES
        assert n == len(buf.getvalue())

    def test_deterministic_output(self):
        traces = [mktrace("p1", "ACD"), mktrace("p2", "AG")]
        a, b = io.BytesIO(), io.BytesIO()
        write_xes(traces, a)
        write_xes(traces, b)
        assert a.getvalue() == b.getvalue()

    def test_round_trip_traces(self):
        rng = random.Random(5)
        for _ in range(20):
            traces = [
                mktrace(f"t{i}", [rng.choice("ABCDEFG") for _ in range(rng.randint(1, 6))])
                for i in range(rng.randint(1, 10))
            ]
            buf = io.BytesIO()
            write_xes(traces, buf)
            buf.seek(0)
            assert trace_shape(read_xes(buf)) == trace_shape(traces)

    def test_raw_log_groups_by_case_first_appearance(self):
        log = mklog(
            ("p2", "A", "2020-03-01"),
            ("p1", "A", "2020-03-02"),
            ("p2", "B", "2020-03-03"),
        )
        buf = io.BytesIO()
        write_xes(log, buf)
        buf.seek(0)
        traces = read_xes(buf)
        assert [t.trace_id for t in traces] == ["p2", "p1"]
        assert traces[0].activities == ("A", "B")

    def test_missing_timestamp_names_trace(self):
        doc = (
            '<?xml version="1.0"?><log><trace>'
            '<string key="concept:name" value="bad-trace"/>'
            '<event><string key="concept:name" value="A"/></event>'
            "</trace></log>"
        )
        with pytest.raises(XesFormatError, match="bad-trace"):
            read_xes(io.BytesIO(doc.encode()))

    def test_missing_name_is_an_error(self):
        doc = (
            '<?xml version="1.0"?><log><trace>'
            '<event><date key="time:timestamp" value="2020-03-01T00:00:00+00:00"/></event>'
            "</trace></log>"
        )
        with pytest.raises(XesFormatError, match="concept:name"):
            read_xes(io.BytesIO(doc.encode()))

    def test_extraneous_attributes_ignored(self):
        doc = (
            '<?xml version="1.0"?>\n'
            '<log xes.version="1.0" xmlns="http://www.xes-standard.org/">\n'
            '<extension name="Concept" prefix="concept" uri="x"/>\n'
            "<trace>\n"
            '<string key="concept:name" value="p9"/>\n'
            '<string key="org:group" value="clinic"/>\n'
            "<event>\n"
            '<string key="org:resource" value="gp"/>\n'
            '<string key="concept:name" value="G"/>\n'
            '<date key="time:timestamp" value="2020-04-01T13:45:00Z"/>\n'
            '<int key="amount" value="3"/>\n'
            "</event>\n"
            "</trace>\n"
            "</log>\n"
        )
        traces = read_xes(io.BytesIO(doc.encode()))
        assert trace_shape(traces) == [("p9", (("G", day_of("2020-04-01")),))]

    def test_timestamps_truncate_to_day(self):
        doc = EXPECTED_SINGLE_EVENT_XES.replace("T00:00:00+00:00", "T23:59:59+11:00")
        traces = read_xes(io.BytesIO(doc.encode()))
        assert traces[0].events[0].day == day_of("2020-03-01")

    def test_unnamed_trace_gets_positional_id(self):
        doc = (
            '<?xml version="1.0"?><log><trace>'
            '<event><string key="concept:name" value="A"/>'
            '<date key="time:timestamp" value="2020-03-01"/></event>'
            "</trace></log>"
        )
        traces = read_xes(io.BytesIO(doc.encode()))
        assert traces[0].trace_id == "trace-1"

    def test_malformed_document(self):
        with pytest.raises(XesFormatError, match="malformed"):
            read_xes(io.BytesIO(b"<log><trace>"))

    def test_attribute_values_escaped(self):
        trace = Trace('a"b<c>&', (ev('a"b<c>&', "A", "2020-03-01"),))
        buf = io.BytesIO()
        write_xes([trace], buf)
        buf.seek(0)
        assert read_xes(buf)[0].trace_id == 'a"b<c>&'


class TestTraceText:
    def test_round_trip(self):
        traces = [mktrace("p1#1", "ACA"), mktrace("p1", "A")]
        buf = io.StringIO()
        write_trace_text(traces, buf)
        assert buf.getvalue() == "p1#1: A,C,A\np1: A\n"
        back = read_trace_text(io.StringIO(buf.getvalue()))
        assert [(t.trace_id, t.activities) for t in back] == [
            ("p1#1", ("A", "C", "A")),
            ("p1", ("A",)),
        ]

    def test_bad_line(self):
        with pytest.raises(CsvFormatError, match="line 1"):
            read_trace_text(io.StringIO("nonsense\n"))


class TestPeriodWindow:
    def test_default_window_boundaries(self):
        log = mklog(
            ("p", "A", "2020-02-29"),
            ("p", "B", "2020-03-01"),
            ("p", "C", "2020-11-30"),
            ("p", "D", "2020-12-01"),
        )
        kept = filter_period(log, PeriodWindow(2020))
        assert [e.activity for e in kept] == ["B", "C"]

    def test_empty_log(self):
        assert filter_period(EventLog(), PeriodWindow(2020)) == EventLog()

    def test_disjoint_year(self):
        log = mklog(("p", "A", "2020-05-05"))
        assert len(filter_period(log, PeriodWindow(2019))) == 0

    def test_output_is_subsequence(self):
        rng = random.Random(3)
        events = [
            ev("p", "A", 737000 + rng.randint(0, 2000)) for _ in range(200)
        ]
        log = EventLog(events)
        kept = filter_period(log, PeriodWindow(2019))
        it = iter(log)
        assert all(any(e == x for x in it) for e in kept)

    def test_parse_forms(self):
        assert PeriodWindow.parse("2020") == PeriodWindow(2020)
        assert PeriodWindow.parse("2020:06-15:07-31") == PeriodWindow(2020, (6, 15), (7, 31))
        with pytest.raises(InvalidConfigError):
            PeriodWindow.parse("2020:junk")

    def test_invalid_windows(self):
        with pytest.raises(InvalidConfigError):
            PeriodWindow(2020, (11, 1), (3, 1))
        with pytest.raises(InvalidConfigError):
            PeriodWindow(2021, (2, 29), (3, 1))
