"""Deterministic synthetic event-log generator.

Produces desk-scale logs with the structure the pipeline cares about: cases
emit bursts that open with a start activity and are followed by short-gap
follow-ups; occasional long inter-burst gaps force trace splits downstream,
and a tunable fraction of cases begins with orphan non-start events that
segmentation must drop. The generator is a test fixture: orderings and rough
magnitudes are calibrated, nothing more.

Randomness comes from SplitMix64 (Steele et al.'s 64-bit mix generator), not
the platform RNG, so identical seeds give byte-identical logs everywhere.
Per-case sub-seeds are derived from the profile seed, making case generation
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from operator import attrgetter
from typing import Mapping

from .errors import InvalidConfigError
from .events import ActivityOrder, DEFAULT_ORDER, Event, EventLog

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_DOUBLE_SCALE = 2.0 ** -53


class SplitMix64:
    """SplitMix64: state += golden gamma; output is the mixed state.

    Small, fast, and fully specified by integer arithmetic, which keeps
    generated logs identical across platforms and Python versions.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], bounds inclusive."""
        return lo + self.next_u64() % (hi - lo + 1)

    def geometric(self, mean: float) -> int:
        """Failures before the first success, with the given mean (>= 0)."""
        if mean <= 0:
            return 0
        p = 1.0 / (mean + 1.0)
        count = 0
        while self.random() >= p and count < 10_000:
            count += 1
        return count


def _case_seed(seed: int, index: int) -> int:
    return (seed + (index + 1) * _GOLDEN) & _MASK64


#: Weighted uniform bands for the gap between consecutive bursts of a case:
#: (weight, low day, high day). The long band exceeds the default 180-day
#: threshold so splits actually happen.
DEFAULT_GAP_BANDS = ((0.35, 1, 29), (0.25, 30, 179), (0.40, 181, 700))

DEFAULT_ACTIVITY_MIX = {
    "A": 0.34,
    "B": 0.12,
    "C": 0.13,
    "D": 0.07,
    "E": 0.11,
    "F": 0.17,
    "G": 0.03,
}

#: April peak for vaccinations: weight multiplier applied in the peak month.
DEFAULT_SEASONAL_PEAKS = {"G": (4, 6.0)}


@dataclass(frozen=True)
class SynthProfile:
    """Knobs of the generator; the defaults give a GP-like shape."""

    case_count: int = 10_000
    date_range: tuple[date, date] = (date(2016, 1, 1), date(2020, 11, 30))
    alphabet: ActivityOrder = DEFAULT_ORDER
    # 0.5 calibrates the segmentation drop fraction into the few-percent band
    start_activity_weight: float = 0.5
    burst_length_mean: float = 4.0
    inter_burst_gap_days: tuple[tuple[float, int, int], ...] = DEFAULT_GAP_BANDS
    activity_mix: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_ACTIVITY_MIX))
    seasonal_peaks: Mapping[str, tuple[int, float]] = field(
        default_factory=lambda: dict(DEFAULT_SEASONAL_PEAKS)
    )
    seed: int = 2016

    def validate(self) -> None:
        if self.case_count < 0:
            raise InvalidConfigError("case_count must be >= 0")
        start, end = self.date_range
        if start >= end:
            raise InvalidConfigError("date_range must be non-degenerate")
        if not 0.0 <= self.start_activity_weight <= 1.0:
            raise InvalidConfigError("start_activity_weight must be in [0, 1]")
        if self.burst_length_mean < 0:
            raise InvalidConfigError("burst_length_mean must be >= 0")
        if not self.inter_burst_gap_days:
            raise InvalidConfigError("at least one inter-burst gap band is required")
        for weight, lo, hi in self.inter_burst_gap_days:
            if weight < 0 or lo < 1 or hi < lo:
                raise InvalidConfigError(f"bad gap band ({weight}, {lo}, {hi})")
        if not any(w > 0 for w, _, _ in self.inter_burst_gap_days):
            raise InvalidConfigError("gap band weights are all zero")
        mix = self.activity_mix
        unknown = set(mix) - set(self.alphabet.labels)
        if unknown:
            raise InvalidConfigError(f"activity_mix labels not in alphabet: {sorted(unknown)}")
        if any(w < 0 for w in mix.values()) or not any(w > 0 for w in mix.values()):
            raise InvalidConfigError("activity_mix needs non-negative weights, at least one > 0")
        for label, (month, concentration) in self.seasonal_peaks.items():
            if label not in self.alphabet:
                raise InvalidConfigError(f"seasonal peak for unknown activity {label!r}")
            if not 1 <= month <= 12 or concentration <= 0:
                raise InvalidConfigError(f"bad seasonal peak for {label!r}")


def _cumulative(weights: list[float]) -> list[float]:
    total = 0.0
    out = []
    for w in weights:
        total += w
        out.append(total)
    return out


def _pick(rng: SplitMix64, cumulative: list[float]) -> int:
    u = rng.random() * cumulative[-1]
    for i, boundary in enumerate(cumulative):
        if u < boundary:
            return i
    return len(cumulative) - 1


def generate(profile: SynthProfile = SynthProfile()) -> EventLog:
    """Generate a date-sorted event log from the profile, deterministically.

    Each case starts at a uniform day in the range and emits bursts until the
    range ends. A burst opens with the alphabet's first label (the start
    activity) with probability ``start_activity_weight``, otherwise with a
    non-start activity; follow-ups are drawn from ``activity_mix``, reshaped
    by ``seasonal_peaks`` in their month, at mostly same-day or next-day
    gaps. Case ids never contain the reserved ``#`` separator.
    """
    profile.validate()
    labels = list(profile.alphabet.labels)
    start_label = labels[0]
    mix = [float(profile.activity_mix.get(label, 0.0)) for label in labels]

    # Per-month cumulative weight tables (seasonal peaks applied).
    monthly_cum: list[list[float]] = []
    for month in range(1, 13):
        weights = list(mix)
        for label, (peak_month, concentration) in profile.seasonal_peaks.items():
            if month == peak_month:
                weights[labels.index(label)] *= concentration
        monthly_cum.append(_cumulative(weights))

    non_start = [w if labels[i] != start_label else 0.0 for i, w in enumerate(mix)]
    if not any(w > 0 for w in non_start):
        non_start = [0.0 if l == start_label else 1.0 for l in labels]
    non_start_cum = _cumulative(non_start)
    gap_cum = _cumulative([w for w, _, _ in profile.inter_burst_gap_days])
    gap_bands = [(lo, hi) for _, lo, hi in profile.inter_burst_gap_days]

    start_day = profile.date_range[0].toordinal()
    end_day = profile.date_range[1].toordinal()
    month_of = [date.fromordinal(d).month for d in range(start_day, end_day + 1)]

    events: list[Event] = []
    for i in range(profile.case_count):
        rng = SplitMix64(_case_seed(profile.seed, i))
        case_id = f"p{i:07d}"
        day = rng.randint(start_day, end_day)
        while day <= end_day:
            # burst opener
            if rng.random() < profile.start_activity_weight:
                events.append(Event(case_id, start_label, day))
            else:
                events.append(Event(case_id, labels[_pick(rng, non_start_cum)], day))
            follow_ups = rng.geometric(profile.burst_length_mean)
            d = day
            for _ in range(follow_ups):
                d += rng.geometric(1.0)
                if d > end_day:
                    break
                label = labels[_pick(rng, monthly_cum[month_of[d - start_day] - 1])]
                events.append(Event(case_id, label, d))
            band = gap_bands[_pick(rng, gap_cum)]
            day = max(d, day) + rng.randint(band[0], band[1])

    events.sort(key=attrgetter("day"))
    return EventLog(events)
