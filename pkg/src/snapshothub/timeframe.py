"""Relative time frames: resolution, bucketing, advancement, freshness.

A time frame is anchored at a date and spans a whole number of calendar
units; because it is relative rather than a fixed pair of dates, the system
can infer the next window when a snapshot is updated. Conventions used
throughout:

- ranges are half-open ``[start, end)``
- weeks start on Monday for calendar-aligned bucketing
- month/quarter/year addition clamps the day of month (Jan 31 + 1 month is
  Feb 28 or 29)
- advancement walks the period grid seeded at the frame's original anchor
  and lands on the latest fully elapsed period, so partial periods are
  never published
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, replace
from datetime import date, timedelta
from typing import TYPE_CHECKING, Any, Iterable, Literal, Optional

from .canonical import parse_iso_date
from .errors import ValidationError

if TYPE_CHECKING:
    from .datacore import ResolvedTable

TimeUnit = Literal["day", "week", "month", "quarter", "year"]
BucketPolicy = Literal["anchor-aligned", "calendar-aligned"]

TIME_UNITS: tuple[TimeUnit, ...] = ("day", "week", "month", "quarter", "year")
WEEKDAYS: tuple[str, ...] = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

_UNIT_RANK = {unit: rank for rank, unit in enumerate(TIME_UNITS)}
_MONTHS_PER = {"month": 1, "quarter": 3, "year": 12}


def add_units(day: date, unit: TimeUnit, count: int) -> date:
    """Add ``count`` units (may be negative), clamping the day of month."""
    if unit == "day":
        return day + timedelta(days=count)
    if unit == "week":
        return day + timedelta(weeks=count)
    total = day.year * 12 + (day.month - 1) + _MONTHS_PER[unit] * count
    year, month_index = divmod(total, 12)
    month = month_index + 1
    return date(year, month, min(day.day, calendar.monthrange(year, month)[1]))


def weekday_name(day: date) -> str:
    return WEEKDAYS[day.weekday()]


@dataclass(frozen=True)
class Span:
    """A duration of whole calendar units, e.g. 2 weeks."""

    count: int
    unit: TimeUnit

    def __post_init__(self) -> None:
        if self.unit not in TIME_UNITS:
            raise ValidationError("InvalidTimeFrame", f"unknown time unit {self.unit!r}")
        if self.count < 1:
            raise ValidationError("InvalidTimeFrame", "span count must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {"count": self.count, "unit": self.unit}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Span":
        return cls(count=int(data["count"]), unit=data["unit"])


@dataclass(frozen=True)
class DateRange:
    """Half-open [start, end)."""

    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValidationError(
                "InvalidDateRange",
                f"start {self.start} must precede end {self.end}",
            )

    def __contains__(self, day: date) -> bool:
        return self.start <= day < self.end

    def days(self) -> Iterable[date]:
        current = self.start
        while current < self.end:
            yield current
            current += timedelta(days=1)

    def to_dict(self) -> dict[str, str]:
        return {"start": self.start.isoformat(), "end": self.end.isoformat()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DateRange":
        return cls(parse_iso_date(data["start"]), parse_iso_date(data["end"]))


@dataclass(frozen=True)
class Bucket:
    """One sub-period of a resolved range; labeled by its start date."""

    range: DateRange
    label: str

    def to_dict(self) -> dict[str, str]:
        return {"start": self.range.start.isoformat(),
                "end": self.range.end.isoformat(),
                "label": self.label}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Bucket":
        return cls(DateRange(parse_iso_date(data["start"]), parse_iso_date(data["end"])),
                   data["label"])


@dataclass(frozen=True)
class TimeFrame:
    """Relative window over a temporal field.

    ``anchor`` is the current window start; ``grid_seed`` remembers the
    anchor the frame was first defined with, which keeps the advancement
    grid stable across repeated updates (clamped month ends would otherwise
    drift).
    """

    temporal_field: str
    anchor: date
    span: Span
    bucket_unit: TimeUnit
    weekday_subset: Optional[frozenset[str]] = None
    grid_seed: Optional[date] = None

    def __post_init__(self) -> None:
        if self.bucket_unit not in TIME_UNITS:
            raise ValidationError("InvalidTimeFrame",
                                  f"unknown bucket unit {self.bucket_unit!r}")
        if _UNIT_RANK[self.bucket_unit] > _UNIT_RANK[self.span.unit]:
            raise ValidationError(
                "InvalidTimeFrame",
                f"bucket unit {self.bucket_unit} is coarser than span unit {self.span.unit}",
            )
        if self.weekday_subset is not None:
            bad = set(self.weekday_subset) - set(WEEKDAYS)
            if bad:
                raise ValidationError("InvalidTimeFrame", f"unknown weekdays: {sorted(bad)}")
            if not self.weekday_subset:
                raise ValidationError("InvalidTimeFrame", "weekday subset must be non-empty")

    @property
    def seed(self) -> date:
        return self.grid_seed if self.grid_seed is not None else self.anchor

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "temporalField": self.temporal_field,
            "anchor": self.anchor.isoformat(),
            "span": self.span.to_dict(),
            "bucketUnit": self.bucket_unit,
        }
        if self.weekday_subset is not None:
            data["weekdaySubset"] = sorted(self.weekday_subset)
        if self.grid_seed is not None and self.grid_seed != self.anchor:
            data["gridSeed"] = self.grid_seed.isoformat()
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TimeFrame":
        try:
            subset = data.get("weekdaySubset")
            return cls(
                temporal_field=data["temporalField"],
                anchor=parse_iso_date(data["anchor"], what="anchor"),
                span=Span.from_dict(data["span"]),
                bucket_unit=data["bucketUnit"],
                weekday_subset=frozenset(subset) if subset is not None else None,
                grid_seed=(parse_iso_date(data["gridSeed"]) if "gridSeed" in data else None),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError("InvalidTimeFrame", f"bad time frame: {exc}") from exc


def resolve_range(tf: TimeFrame) -> DateRange:
    """[anchor, anchor + span), with calendar-aware addition."""
    return DateRange(tf.anchor, add_units(tf.anchor, tf.span.unit, tf.span.count))


def bucketize(rng: DateRange, unit: TimeUnit,
              policy: BucketPolicy = "anchor-aligned") -> list[Bucket]:
    """Partition a range into unit-sized buckets.

    Anchor-aligned buckets step from ``rng.start`` (the last one is clipped
    at ``rng.end``); calendar-aligned buckets are calendar periods (ISO
    weeks from Monday, calendar months/quarters/years) intersected with the
    range, so the first and last may be partial. Both policies yield a
    disjoint cover of the range.
    """
    if policy not in ("anchor-aligned", "calendar-aligned"):
        raise ValidationError("InvalidBucketPolicy", f"unknown policy {policy!r}")
    if add_units(rng.start, unit, 1) > rng.end:
        raise ValidationError(
            "UnitTooCoarse",
            f"{unit} buckets do not fit the range {rng.start}..{rng.end}",
        )
    origin = rng.start if policy == "anchor-aligned" else _period_start(rng.start, unit)
    buckets: list[Bucket] = []
    step = 0
    while True:
        lo = add_units(origin, unit, step)
        hi = add_units(origin, unit, step + 1)
        start = max(lo, rng.start)
        if start >= rng.end:
            break
        end = min(hi, rng.end)
        buckets.append(Bucket(DateRange(start, end), start.isoformat()))
        step += 1
    return buckets


def _period_start(day: date, unit: TimeUnit) -> date:
    if unit == "day":
        return day
    if unit == "week":
        return day - timedelta(days=day.weekday())
    if unit == "month":
        return day.replace(day=1)
    if unit == "quarter":
        return date(day.year, ((day.month - 1) // 3) * 3 + 1, 1)
    return date(day.year, 1, 1)


def advance(tf: TimeFrame, now: date) -> TimeFrame:
    """Move the frame to the latest fully elapsed period, or return it as is.

    Period boundaries form a grid seeded at the frame's original anchor:
    seed, seed+span, seed+2*span, ... The new anchor is the grid point whose
    period end is the latest boundary <= ``now``. If not even the next
    period has fully elapsed, the frame is returned unchanged, so a frame
    never exposes a partial period.
    """
    seed = tf.seed
    step = 1
    best: Optional[date] = None
    while True:
        end = add_units(seed, tf.span.unit, tf.span.count * (step + 1))
        if end > now:
            break
        best = add_units(seed, tf.span.unit, tf.span.count * step)
        step += 1
    if best is None or best == tf.anchor:
        return tf
    return replace(tf, anchor=best, grid_seed=seed)


def restrict_weekdays(rows: list[dict[str, Any]], tf: TimeFrame) -> list[dict[str, Any]]:
    """Keep rows whose temporal value falls on an allowed weekday."""
    if tf.weekday_subset is None:
        return list(rows)
    return [row for row in rows
            if weekday_name(row[tf.temporal_field]) in tf.weekday_subset]


def feasible_buckets(tf: TimeFrame, policy: BucketPolicy = "anchor-aligned") -> list[Bucket]:
    """Buckets of the resolved range that can contain data at all.

    With a weekday subset, buckets holding none of the allowed weekdays are
    dropped; they are empty by construction and must not read as gaps.
    """
    buckets = bucketize(resolve_range(tf), tf.bucket_unit, policy)
    if tf.weekday_subset is None:
        return buckets
    allowed = tf.weekday_subset
    return [b for b in buckets
            if any(weekday_name(day) in allowed for day in b.range.days())]


def detect_gaps(table: "ResolvedTable", tf: TimeFrame) -> list[Bucket]:
    """Feasible buckets of the frame that received zero source rows."""
    present = {row.bucket.label for row in table.rows if row.bucket is not None}
    return [b for b in feasible_buckets(tf) if b.label not in present]


def infer_freshness(frames: Iterable[Optional[TimeFrame]]) -> Optional[date]:
    """Latest window end across components, or None when no frame exists.

    A snapshot without any time frame has no inferred best-before date and
    never goes stale on its own.
    """
    ends = [resolve_range(tf).end for tf in frames if tf is not None]
    return max(ends) if ends else None
