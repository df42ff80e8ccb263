"""Exception hierarchy shared across the toolkit.

Every error carries a short ``category`` slug; the CLI maps categories to
distinct exit codes.
"""

from __future__ import annotations


class CareflowError(Exception):
    """Base class for all toolkit errors."""

    category = "error"


class UnknownActivityError(CareflowError):
    """An activity label is not present in the configured activity order."""

    category = "unknown-activity"

    def __init__(self, labels):
        self.labels = tuple(sorted(set(labels)))
        noun = "activity" if len(self.labels) == 1 else "activities"
        super().__init__(f"unknown {noun}: {', '.join(self.labels)}")


class CsvFormatError(CareflowError):
    """The CSV source cannot be interpreted under the declared schema."""

    category = "csv-format"


class RejectThresholdError(CsvFormatError):
    """Too many rows were rejected for the parse to be trusted."""

    category = "reject-threshold"


class XesFormatError(CareflowError):
    """The XES document is malformed or missing required attributes."""

    category = "xes-format"


class UnsortedLogError(CareflowError):
    """An operation that requires a date-ordered log saw a date regression."""

    category = "unsorted-log"


class EmptyLogError(CareflowError):
    """An operation that needs at least one event or trace got none."""

    category = "empty-log"


class InvalidConfigError(CareflowError):
    """A configuration object (schema, window, profile, ...) is invalid."""

    category = "invalid-config"
