"""careflow: day-granular event-log toolkit for highly variable processes.

Pipeline: ingest CSV/XES logs, repair timestamp ties with an activity-order
tie-breaker, segment unbounded cases into bounded traces via a start-activity
set and two day thresholds, then compute log statistics, directly-follows
matrices, variant rankings, temporal histograms, and cross-log diffs.
"""

from .analytics import (
    DFGMatrix,
    LogStats,
    TemporalHistogram,
    VariantRanking,
    activity_counts,
    compute_dfg,
    compute_stats,
    percentage,
    relative_frequencies,
    temporal_histogram,
    top_k_variants,
    variant_counts,
)
from .compare import (
    ChangeEntry,
    ChangeReport,
    CooccurrenceRule,
    change_report,
    cooccurrence_diff,
    render_rules,
    rules_to_csv,
)
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
from .events import (
    ActivityOrder,
    DEFAULT_ORDER,
    Event,
    EventLog,
    Trace,
    day_of,
    day_to_date,
    day_to_iso,
    event_compare,
    event_sort_key,
)
from .ingest import (
    CANONICAL_SCHEMA,
    CsvSchema,
    ParseReport,
    PeriodWindow,
    RESERVED_ID_SEPARATOR,
    filter_period,
    parse_csv,
    read_trace_text,
    read_xes,
    write_csv,
    write_trace_text,
    write_xes,
)
from .repair import repair_log
from .segmentation import (
    SegmentationConfig,
    SegmentationResult,
    SegmentationState,
    check_boundaries,
    check_partition,
    check_thresholds,
    generate_trace_id,
    segment,
    split_trace_id,
)
from .synth import SplitMix64, SynthProfile, generate

__version__ = "0.1.0"

__all__ = [
    "ActivityOrder",
    "CANONICAL_SCHEMA",
    "CareflowError",
    "ChangeEntry",
    "ChangeReport",
    "CooccurrenceRule",
    "CsvFormatError",
    "CsvSchema",
    "DEFAULT_ORDER",
    "DFGMatrix",
    "EmptyLogError",
    "Event",
    "EventLog",
    "InvalidConfigError",
    "LogStats",
    "ParseReport",
    "PeriodWindow",
    "RESERVED_ID_SEPARATOR",
    "RejectThresholdError",
    "SegmentationConfig",
    "SegmentationResult",
    "SegmentationState",
    "SplitMix64",
    "SynthProfile",
    "TemporalHistogram",
    "Trace",
    "UnknownActivityError",
    "UnsortedLogError",
    "VariantRanking",
    "XesFormatError",
    "activity_counts",
    "change_report",
    "check_boundaries",
    "check_partition",
    "check_thresholds",
    "compute_dfg",
    "compute_stats",
    "cooccurrence_diff",
    "day_of",
    "day_to_date",
    "day_to_iso",
    "event_compare",
    "event_sort_key",
    "filter_period",
    "generate",
    "generate_trace_id",
    "parse_csv",
    "percentage",
    "read_trace_text",
    "read_xes",
    "relative_frequencies",
    "render_rules",
    "repair_log",
    "rules_to_csv",
    "segment",
    "split_trace_id",
    "temporal_histogram",
    "top_k_variants",
    "variant_counts",
    "write_csv",
    "write_trace_text",
    "write_xes",
]
