"""Command-line interface: the pipeline as composable file-based subcommands.

Each stage reads and writes files so every intermediate stays inspectable:
``convert`` between CSV and XES, ``repair`` to fix timestamp ties, ``segment``
to cut traces, then ``stats``/``dfg``/``variants``/``timeline``/``diff``/
``changes`` for the analytics, and ``synth`` to produce test logs. Parse
reports are emitted to standard error as JSON lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from datetime import date
from pathlib import Path

from . import analytics, compare, ingest, repair as repair_mod, segmentation, synth
from .errors import (
    CareflowError,
    CsvFormatError,
    EmptyLogError,
    InvalidConfigError,
    RejectThresholdError,
    UnknownActivityError,
    UnsortedLogError,
    XesFormatError,
)
from .events import ActivityOrder, DEFAULT_ORDER, EventLog

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CSV = 4
EXIT_XES = 5
EXIT_UNKNOWN_ACTIVITY = 6
EXIT_UNSORTED = 7
EXIT_CONFIG = 8

_EXIT_CODES = """\
exit codes:
  0  success
  2  usage error (bad arguments)
  3  I/O error (unreadable input, write failure)
  4  CSV format error, including reject fraction above threshold
  5  XES format error
  6  unknown activity label (not in the configured order)
  7  input log not date-ordered (run `repair` first)
  8  invalid configuration or empty input
"""


def _exit_code_for(exc: CareflowError) -> int:
    if isinstance(exc, (CsvFormatError, RejectThresholdError)):
        return EXIT_CSV
    if isinstance(exc, XesFormatError):
        return EXIT_XES
    if isinstance(exc, UnknownActivityError):
        return EXIT_UNKNOWN_ACTIVITY
    if isinstance(exc, UnsortedLogError):
        return EXIT_UNSORTED
    if isinstance(exc, (InvalidConfigError, EmptyLogError)):
        return EXIT_CONFIG
    return 1


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved run configuration; serializes losslessly for reproducibility
    records (``--dump-config``)."""

    command: str
    inputs: tuple[str, ...]
    output: str | None = None
    order: tuple[str, ...] | None = None
    start_activities: tuple[str, ...] | None = None
    delta0_days: int | None = None
    delta_n_days: int | None = None
    window: str | None = None
    out_format: str | None = None
    seed: int | None = None
    k: int | None = None
    top_n: int | None = None
    min_support: float | None = None

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("inputs", "order", "start_activities"):
            if data.get(key) is not None:
                data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        for key in ("inputs", "order", "start_activities"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(**data)


def _parse_label_list(value: str) -> tuple[str, ...]:
    path = Path(value)
    if path.is_file():
        tokens = path.read_text(encoding="utf-8").replace(",", "\n").split()
    else:
        tokens = [t for t in value.split(",") if t]
    return tuple(tokens)


def _resolve_order(value: str | None) -> ActivityOrder:
    if value is None:
        return DEFAULT_ORDER
    return ActivityOrder(_parse_label_list(value))


def _resolve_window(value: str | None) -> ingest.PeriodWindow | None:
    return ingest.PeriodWindow.parse(value) if value is not None else None


def _schema_from_args(args) -> ingest.CsvSchema:
    return ingest.CsvSchema(
        case_column=args.case_column,
        activity_column=args.activity_column,
        date_column=args.date_column,
        date_format=args.date_format,
        delimiter=args.delimiter,
        has_header=not args.no_header,
    )


def _read_log(path: str, args) -> EventLog:
    """Parse a CSV event log, report to stderr, apply the window if any."""
    log, report = ingest.parse_csv(
        path, _schema_from_args(args), max_reject_fraction=args.max_reject_fraction
    )
    print(report.to_json(), file=sys.stderr)
    window = _resolve_window(getattr(args, "window", None))
    if window is not None:
        log = ingest.filter_period(log, window)
    return log


def _load_traces(path: str):
    if path.endswith(".xes"):
        return ingest.read_xes(path)
    return ingest.read_trace_text(path)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") or not text else text + "\n", "utf-8")


def _dump_config(args, config: PipelineConfig) -> None:
    if getattr(args, "dump_config", None):
        Path(args.dump_config).write_text(json.dumps(config.to_dict(), indent=2) + "\n", "utf-8")


def _config_from_args(args, command: str, inputs, output=None) -> PipelineConfig:
    return PipelineConfig(
        command=command,
        inputs=tuple(inputs),
        output=output,
        order=_parse_label_list(args.order) if getattr(args, "order", None) else None,
        start_activities=(
            _parse_label_list(args.alpha) if getattr(args, "alpha", None) else None
        ),
        delta0_days=getattr(args, "delta0_days", None),
        delta_n_days=getattr(args, "deltan_days", None),
        window=getattr(args, "window", None),
        out_format=getattr(args, "format", None),
        seed=getattr(args, "seed", None),
        k=getattr(args, "k", None),
        top_n=getattr(args, "top_n", None),
        min_support=getattr(args, "min_support", None),
    )


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_convert(args) -> int:
    target = args.to
    if target is None:
        suffix = Path(args.output).suffix.lower()
        target = "xes" if suffix == ".xes" else "csv"
    _dump_config(args, _config_from_args(args, "convert", [args.input], args.output))

    if args.input.endswith(".xes"):
        traces = _load_traces(args.input)
        if target == "xes":
            ingest.write_xes(traces, args.output)
        else:
            events = [e for t in traces for e in t.events]
            ingest.write_csv(events, args.output, _schema_from_args(args))
    else:
        log = _read_log(args.input, args)
        if target == "xes":
            ingest.write_xes(log, args.output)
        else:
            ingest.write_csv(log, args.output, _schema_from_args(args))
    return EXIT_OK


def _cmd_repair(args) -> int:
    order = _resolve_order(args.order)
    _dump_config(args, _config_from_args(args, "repair", [args.input], args.output))
    log = _read_log(args.input, args)
    repaired = repair_mod.repair_log(log, order)
    ingest.write_csv(repaired, args.output, _schema_from_args(args))
    return EXIT_OK


def _segmentation_config(args) -> segmentation.SegmentationConfig:
    alpha = frozenset(_parse_label_list(args.alpha)) if args.alpha else frozenset({"A"})
    return segmentation.SegmentationConfig(
        start_activities=alpha,
        delta0_days=args.delta0_days,
        delta_n_days=args.deltan_days,
    )


def _cmd_segment(args) -> int:
    config = _segmentation_config(args)
    _dump_config(args, _config_from_args(args, "segment", [args.input], args.output))
    log = _read_log(args.input, args)
    try:
        result = segmentation.segment(log, config)
    except UnsortedLogError as exc:
        raise UnsortedLogError(f"{exc} (run `careflow repair` first)") from None
    report = json.dumps(result.report_dict(), sort_keys=True)
    print(report, file=sys.stderr)
    if args.report:
        Path(args.report).write_text(report + "\n", "utf-8")
    fmt = args.format or ("xes" if args.output.endswith(".xes") else "text")
    if fmt == "xes":
        ingest.write_xes(result.traces, args.output)
    else:
        ingest.write_trace_text(result.traces, args.output)
    return EXIT_OK


def _dropped_from_args(args) -> int:
    if args.report:
        data = json.loads(Path(args.report).read_text("utf-8"))
        return int(data["dropped_events"])
    return args.dropped


def _cmd_stats(args) -> int:
    _dump_config(args, _config_from_args(args, "stats", [args.input], args.out))
    traces = _load_traces(args.input)
    stats = analytics.compute_stats(traces, _dropped_from_args(args))
    fmt = args.format or "json"
    if fmt == "json":
        _emit(stats.to_json(), args.out)
    elif fmt == "csv":
        fields = stats.to_dict()
        header = ",".join(fields)
        row = ",".join(str(v) for v in fields.values())
        _emit(f"{header}\n{row}\n", args.out)
    else:
        _emit("\n".join(f"{k}: {v}" for k, v in stats.to_dict().items()), args.out)
    return EXIT_OK


def _cmd_dfg(args) -> int:
    _dump_config(args, _config_from_args(args, "dfg", [args.input], args.out))
    traces = _load_traces(args.input)
    order = _resolve_order(args.order) if args.order else None
    matrix = analytics.compute_dfg(traces, order)
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(json.dumps(matrix.to_dict()), args.out)
    else:
        _emit(matrix.to_csv(), args.out)
    return EXIT_OK


def _cmd_variants(args) -> int:
    _dump_config(args, _config_from_args(args, "variants", [args.input], args.out))
    traces = _load_traces(args.input)
    ranking = analytics.top_k_variants(traces, args.k)
    fmt = args.format or "text"
    if fmt == "json":
        _emit(json.dumps(ranking.to_dict()), args.out)
    elif fmt == "csv":
        _emit(ranking.to_csv(), args.out)
    else:
        _emit("\n".join(ranking.render_lines()), args.out)
    return EXIT_OK


def _cmd_timeline(args) -> int:
    _dump_config(args, _config_from_args(args, "timeline", [args.input], args.out))
    window = _resolve_window(args.window)
    if window is None:
        raise InvalidConfigError("timeline requires --window YEAR[:MM-DD:MM-DD]")
    log = ingest.parse_csv(args.input, _schema_from_args(args),
                           max_reject_fraction=args.max_reject_fraction)[0]
    histogram = analytics.temporal_histogram(log, args.activity, args.bucket, window)
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(json.dumps(histogram.to_dict()), args.out)
    elif fmt == "text":
        _emit("\n".join(f"{s.isoformat()} {c}" for s, c in histogram.buckets), args.out)
    else:
        _emit(histogram.to_csv(), args.out)
    return EXIT_OK


def _cmd_diff(args) -> int:
    _dump_config(args, _config_from_args(args, "diff", [args.input_x, args.input_y], args.out))
    traces_x = _load_traces(args.input_x)
    traces_y = _load_traces(args.input_y)
    rules = compare.cooccurrence_diff(
        traces_x, traces_y, top_n=args.top_n, min_support=args.min_support,
        min_delta_pp=args.min_delta_pp,
    )
    fmt = args.format or "text"
    if fmt == "json":
        _emit(json.dumps([r.to_dict() for r in rules]), args.out)
    elif fmt == "csv":
        _emit(compare.rules_to_csv(rules), args.out)
    else:
        _emit("\n".join(compare.render_rules(rules, args.name_x, args.name_y)), args.out)
    return EXIT_OK


def _cmd_changes(args) -> int:
    _dump_config(
        args, _config_from_args(args, "changes", [args.reference, *args.baselines], args.out)
    )
    schema = _schema_from_args(args)

    def counts(path: str):
        log, report = ingest.parse_csv(path, schema, max_reject_fraction=args.max_reject_fraction)
        print(report.to_json(), file=sys.stderr)
        return analytics.activity_counts(log)

    report = compare.change_report(
        counts(args.reference), [counts(p) for p in args.baselines], aggregate=args.aggregate
    )
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(json.dumps(report.to_dict()), args.out)
    elif fmt == "text":
        lines = []
        for e in report.entries:
            pct = "n/a" if e.change_pct is None else f"{e.change_pct:+.1f}%"
            lines.append(f"{e.label}: {e.count_reference:g} vs {e.count_baseline:g} ({pct})")
        _emit("\n".join(lines), args.out)
    else:
        _emit(report.to_csv(), args.out)
    return EXIT_OK


def _cmd_synth(args) -> int:
    _dump_config(args, _config_from_args(args, "synth", [], args.output))
    profile = synth.SynthProfile(
        case_count=args.cases,
        date_range=(date.fromisoformat(args.start), date.fromisoformat(args.end)),
        seed=args.seed,
    )
    log = synth.generate(profile)
    ingest.write_csv(log, args.output)
    print(json.dumps({"cases": args.cases, "events": len(log), "seed": args.seed}),
          file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def _csv_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("csv options")
    group.add_argument("--delimiter", default=",", help="field delimiter (default ,)")
    group.add_argument("--date-format", default="%Y-%m-%d",
                       help="strptime pattern for dates (default ISO %%Y-%%m-%%d)")
    group.add_argument("--case-column", default="case_id")
    group.add_argument("--activity-column", default="activity")
    group.add_argument("--date-column", default="date")
    group.add_argument("--no-header", action="store_true",
                       help="columns are positional: case, activity, date")
    group.add_argument("--max-reject-fraction", type=float, default=0.01,
                       help="abort when more than this fraction of rows is rejected")


def _common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dump-config", metavar="PATH",
                        help="write the resolved run configuration as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="careflow",
        description="Day-granular event-log toolkit: ingest, repair, segment, analyse.",
        epilog=_EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("convert", help="convert between CSV and XES event logs")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--to", choices=("xes", "csv"), help="target format (default: by suffix)")
    p.add_argument("--window", help="keep only events in YEAR[:MM-DD:MM-DD]")
    _csv_options(p)
    _common_options(p)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("repair", help="sort events by date, tie-broken by activity order")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--order", help="activity order: comma list or file with one label per line")
    p.add_argument("--window", help="keep only events in YEAR[:MM-DD:MM-DD]")
    _csv_options(p)
    _common_options(p)
    p.set_defaults(func=_cmd_repair)

    p = sub.add_parser("segment", help="cut a repaired log into bounded traces")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--alpha", help="start activities, comma list (default A)")
    p.add_argument("--delta0-days", type=int, default=180,
                   help="max days from the trace's first event (default 180)")
    p.add_argument("--deltan-days", type=int, default=30,
                   help="max days from the trace's last event (default 30)")
    p.add_argument("--format", choices=("text", "xes"),
                   help="trace output format (default: by suffix, else text)")
    p.add_argument("--report", metavar="PATH", help="also write the JSON drop report here")
    p.add_argument("--window", help="keep only events in YEAR[:MM-DD:MM-DD]")
    _csv_options(p)
    _common_options(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("stats", help="log statistics from a trace file (.xes or text)")
    p.add_argument("input")
    p.add_argument("--dropped", type=int, default=0, help="dropped-event count to fold in")
    p.add_argument("--report", metavar="PATH", help="read the dropped count from a segment report")
    p.add_argument("--format", choices=("json", "csv", "text"), help="default json")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    _common_options(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("dfg", help="directly-follows matrix from a trace file")
    p.add_argument("input")
    p.add_argument("--order", help="label order for the matrix axes")
    p.add_argument("--format", choices=("csv", "json"), help="default csv")
    p.add_argument("--out", metavar="PATH")
    _common_options(p)
    p.set_defaults(func=_cmd_dfg)

    p = sub.add_parser("variants", help="top-k trace variants by frequency")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=20, help="number of variants (default 20)")
    p.add_argument("--format", choices=("text", "csv", "json"), help="default text")
    p.add_argument("--out", metavar="PATH")
    _common_options(p)
    p.set_defaults(func=_cmd_variants)

    p = sub.add_parser("timeline", help="temporal histogram of one activity")
    p.add_argument("input")
    p.add_argument("--activity", required=True)
    p.add_argument("--bucket", choices=analytics.BUCKET_KINDS, default="month")
    p.add_argument("--window", required=True, help="YEAR[:MM-DD:MM-DD]")
    p.add_argument("--format", choices=("csv", "json", "text"), help="default csv")
    p.add_argument("--out", metavar="PATH")
    _csv_options(p)
    _common_options(p)
    p.set_defaults(func=_cmd_timeline)

    p = sub.add_parser("diff", help="co-occurrence rule differences between two trace files")
    p.add_argument("input_x")
    p.add_argument("input_y")
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--min-support", type=float, default=0.01)
    p.add_argument("--min-delta-pp", type=float, default=0.0)
    p.add_argument("--name-x", default="Variant X")
    p.add_argument("--name-y", default="Variant Y")
    p.add_argument("--format", choices=("text", "csv", "json"), help="default text")
    p.add_argument("--out", metavar="PATH")
    _common_options(p)
    p.set_defaults(func=_cmd_diff)

    p = sub.add_parser("changes", help="per-activity count changes vs baseline logs")
    p.add_argument("reference")
    p.add_argument("baselines", nargs="+")
    p.add_argument("--aggregate", choices=("mean", "single"), default="mean")
    p.add_argument("--format", choices=("csv", "json", "text"), help="default csv")
    p.add_argument("--out", metavar="PATH")
    _csv_options(p)
    _common_options(p)
    p.set_defaults(func=_cmd_changes)

    p = sub.add_parser("synth", help="generate a deterministic synthetic event log (CSV)")
    p.add_argument("output")
    p.add_argument("--cases", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=2016)
    p.add_argument("--start", default="2016-01-01", help="range start date")
    p.add_argument("--end", default="2020-11-30", help="range end date")
    _common_options(p)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CareflowError as exc:
        print(f"careflow: error[{exc.category}]: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except OSError as exc:
        print(f"careflow: error[io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
