"""Cross-log comparison: co-occurrence rule diffs and absolute-frequency
change reports.

Co-occurrence is presence-level: "if x occurs in a process instance, y also
occurs", with probabilities taken over trace sets, never over adjacency.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EmptyLogError, InvalidConfigError
from .events import Trace

CONDITIONAL = "conditional"
UNCONDITIONAL = "unconditional"


@dataclass(frozen=True)
class CooccurrenceRule:
    """One rule with its probability in each log and the gap between them.

    ``favored`` is ``"x"`` or ``"y"`` for the log where the rule is more
    likely, or ``None`` on an exact tie. ``delta_pp`` is the absolute gap in
    percentage points.
    """

    kind: str
    antecedent: str | None
    consequent: str
    prob_x: float
    prob_y: float
    delta_pp: float
    favored: str | None

    def render(self, name_x: str = "Variant X", name_y: str = "Variant Y") -> str:
        if self.kind == CONDITIONAL:
            claim = f"that if [{self.antecedent}] occurs, also [{self.consequent}] occurs"
        else:
            claim = f"that [{self.consequent}] occurs in a process instance"
        if self.favored is None:
            return f"In {name_x} and {name_y} it is equally likely {claim}"
        winner, loser = (name_x, name_y) if self.favored == "x" else (name_y, name_x)
        return f"In {winner} it is {self.delta_pp:.2f}% more likely than {loser} {claim}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "antecedent": self.antecedent,
            "consequent": self.consequent,
            "prob_x": self.prob_x,
            "prob_y": self.prob_y,
            "delta_pp": round(self.delta_pp, 4),
            "favored": self.favored,
        }


def render_rules(
    rules: Sequence[CooccurrenceRule],
    name_x: str = "Variant X",
    name_y: str = "Variant Y",
) -> list[str]:
    return [rule.render(name_x, name_y) for rule in rules]


def rules_to_csv(rules: Sequence[CooccurrenceRule]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["kind", "antecedent", "consequent", "p_x", "p_y", "delta_pp", "favored"])
    for r in rules:
        writer.writerow(
            [
                r.kind,
                r.antecedent or "",
                r.consequent,
                f"{r.prob_x:.6f}",
                f"{r.prob_y:.6f}",
                f"{r.delta_pp:.2f}",
                r.favored or "tie",
            ]
        )
    return buffer.getvalue()


def _presence_tables(traces: Sequence[Trace]):
    """Per-log presence counts: (#traces, contains[x], contains_both[x, y])."""
    total = len(traces)
    contains: dict[str, int] = {}
    both: dict[tuple[str, str], int] = {}
    for trace in traces:
        present = sorted({e.activity for e in trace.events})
        for i, x in enumerate(present):
            contains[x] = contains.get(x, 0) + 1
            for y in present[i + 1 :]:
                both[(x, y)] = both.get((x, y), 0) + 1
    return total, contains, both


def cooccurrence_diff(
    traces_x: Sequence[Trace],
    traces_y: Sequence[Trace],
    top_n: int = 10,
    min_support: float = 0.01,
    min_delta_pp: float = 0.0,
) -> list[CooccurrenceRule]:
    """Rank the co-occurrence rules that differ most between two trace sets.

    For every ordered activity pair (x, y), x != y, the conditional rule
    compares P(y in trace | x in trace) between the logs; for every y the
    unconditional rule compares P(y in trace). Conditional rules whose
    antecedent support is below ``min_support`` (or zero) in either log are
    excluded. Rules are ranked by absolute delta descending with a
    deterministic (kind, antecedent, consequent) tie-break; the top ``top_n``
    are returned.
    """
    if top_n < 1:
        raise InvalidConfigError(f"top_n must be >= 1, got {top_n}")
    if not traces_x or not traces_y:
        raise EmptyLogError("co-occurrence diff needs two non-empty trace sets")

    n_x, contains_x, both_x = _presence_tables(traces_x)
    n_y, contains_y, both_y = _presence_tables(traces_y)
    universe = sorted(set(contains_x) | set(contains_y))

    def pair_count(both: dict, x: str, y: str) -> int:
        return both.get((x, y) if x < y else (y, x), 0)

    rules: list[CooccurrenceRule] = []

    def add_rule(kind: str, antecedent: str | None, consequent: str, px: float, py: float):
        delta = px - py
        favored = "x" if delta > 0 else "y" if delta < 0 else None
        delta_pp = abs(delta) * 100.0
        if delta_pp >= min_delta_pp:
            rules.append(
                CooccurrenceRule(kind, antecedent, consequent, px, py, delta_pp, favored)
            )

    for x in universe:
        support_x = contains_x.get(x, 0) / n_x
        support_y = contains_y.get(x, 0) / n_y
        if support_x < min_support or support_y < min_support or not support_x or not support_y:
            continue
        for y in universe:
            if y == x:
                continue
            px = pair_count(both_x, x, y) / contains_x[x]
            py = pair_count(both_y, x, y) / contains_y[x]
            add_rule(CONDITIONAL, x, y, px, py)

    for y in universe:
        add_rule(UNCONDITIONAL, None, y, contains_x.get(y, 0) / n_x, contains_y.get(y, 0) / n_y)

    rules.sort(key=lambda r: (-r.delta_pp, r.kind, r.antecedent or "", r.consequent))
    return rules[:top_n]


@dataclass(frozen=True)
class ChangeEntry:
    """Change of one label's count against its baseline; ``change_pct`` is
    ``None`` when the baseline count is zero."""

    label: str
    count_reference: float
    count_baseline: float
    change_pct: float | None


@dataclass(frozen=True)
class ChangeReport:
    """Per-label changes of a reference log against one or more baselines."""

    entries: tuple[ChangeEntry, ...]

    def by_label(self) -> dict[str, ChangeEntry]:
        return {entry.label: entry for entry in self.entries}

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["label", "count_reference", "count_baseline", "change_pct"])
        for e in self.entries:
            pct = "" if e.change_pct is None else f"{e.change_pct:.1f}"
            writer.writerow([e.label, f"{e.count_reference:g}", f"{e.count_baseline:g}", pct])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "label": e.label,
                    "count_reference": e.count_reference,
                    "count_baseline": e.count_baseline,
                    "change_pct": None if e.change_pct is None else round(e.change_pct, 4),
                }
                for e in self.entries
            ]
        }


def change_report(
    counts_reference: Mapping[str, float],
    baselines: Sequence[Mapping[str, float]],
    aggregate: str = "mean",
) -> ChangeReport:
    """Percentage change of each label's count against the baseline(s).

    With ``aggregate="mean"`` the baseline is the arithmetic mean across all
    baseline mappings (missing labels count as zero); ``"single"`` requires
    exactly one baseline. ``change_pct = 100 * (reference - baseline) /
    baseline``, reported as absent when the baseline is zero.
    """
    if not baselines:
        raise InvalidConfigError("change report needs at least one baseline")
    if aggregate not in ("single", "mean"):
        raise InvalidConfigError(f"aggregate must be 'single' or 'mean', got {aggregate!r}")
    if aggregate == "single" and len(baselines) != 1:
        raise InvalidConfigError("aggregate 'single' requires exactly one baseline")

    labels = set(counts_reference)
    for baseline in baselines:
        labels.update(baseline)

    entries = []
    for label in sorted(labels):
        reference = float(counts_reference.get(label, 0))
        base = sum(float(b.get(label, 0)) for b in baselines) / len(baselines)
        pct = 100.0 * (reference - base) / base if base else None
        entries.append(ChangeEntry(label, reference, base, pct))
    return ChangeReport(tuple(entries))
