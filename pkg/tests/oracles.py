"""Independent oracles the tests check the implementation against.

Everything here is written the slow, obvious way (nested loops, day
walking, linear scans) and deliberately shares no code with the package
beyond primitive types.
"""

from __future__ import annotations

import calendar
from datetime import date, timedelta

WEEKDAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")


def oracle_add_months(day: date, months: int) -> date:
    month_index = day.year * 12 + day.month - 1 + months
    year, month0 = divmod(month_index, 12)
    month = month0 + 1
    last = calendar.monthrange(year, month)[1]
    return date(year, month, min(day.day, last))


def oracle_add(day: date, unit: str, count: int) -> date:
    if unit == "day":
        return day + timedelta(days=count)
    if unit == "week":
        return day + timedelta(days=7 * count)
    factor = {"month": 1, "quarter": 3, "year": 12}[unit]
    return oracle_add_months(day, factor * count)


def oracle_filter(rows: list[dict], predicate) -> list[dict]:
    """Linear scan with a plain Python predicate function."""
    return [row for row in rows if predicate(row)]


def oracle_group_aggregate(rows: list[dict], measure: str, agg: str,
                           dims: list[str]) -> dict[tuple, float]:
    """Brute-force nested-loop group-by over dimension values."""
    keys = []
    for row in rows:
        key = tuple(str(row[d]) for d in dims)
        if key not in keys:
            keys.append(key)
    out: dict[tuple, float] = {}
    for key in keys:
        values = [float(row[measure]) for row in rows
                  if tuple(str(row[d]) for d in dims) == key]
        if agg == "sum":
            out[key] = sum(values)
        elif agg == "mean":
            out[key] = sum(values) / len(values)
        elif agg == "count":
            out[key] = float(len(values))
        elif agg == "min":
            out[key] = min(values)
        elif agg == "max":
            out[key] = max(values)
    return out


def oracle_weekly_sums(rows: list[dict], temporal: str, measure: str,
                       start: date, end: date) -> list[tuple[date, float]]:
    """Anchor-aligned 7-day windows of [start, end), summing the measure."""
    sums = []
    window_start = start
    while window_start < end:
        window_end = min(window_start + timedelta(days=7), end)
        total = sum(float(r[measure]) for r in rows
                    if window_start <= r[temporal] < window_end)
        sums.append((window_start, total))
        window_start = window_end
    return sums


def oracle_grid_walk(seed: date, unit: str, count: int, now: date) -> date | None:
    """Latest grid anchor whose period end is <= now; None when none elapsed.

    Walks boundaries seed + k*span one by one, like a calendar on the wall.
    """
    k = 0
    best = None
    while True:
        anchor = oracle_add(seed, unit, count * k)
        end = oracle_add(seed, unit, count * (k + 1))
        if end > now:
            break
        best = anchor if k > 0 else None
        k += 1
    # k=0 elapsed means the current window is complete but nothing newer is;
    # the frame stays put in that case.
    return best


def oracle_weekdays(rows: list[dict], temporal: str, allowed: set[str]) -> list[dict]:
    return [r for r in rows if WEEKDAY_NAMES[r[temporal].weekday()] in allowed]


def oracle_bucketed_aggregate(rows: list[dict], measure: str, agg: str,
                              dims: list[str], temporal: str,
                              windows: list[tuple[date, date]]) -> dict[tuple, float]:
    """Nested-loop group-by over (dims, window); rows outside all windows drop."""
    tagged = []
    for row in rows:
        for index, (lo, hi) in enumerate(windows):
            if lo <= row[temporal] < hi:
                tagged.append((row, index))
                break
    out: dict[tuple, float] = {}
    seen: list[tuple] = []
    for row, index in tagged:
        key = tuple(str(row[d]) for d in dims) + (index,)
        if key not in seen:
            seen.append(key)
    for key in seen:
        values = [float(row[measure]) for row, index in tagged
                  if tuple(str(row[d]) for d in dims) + (index,) == key]
        if agg == "sum":
            out[key] = sum(values)
        elif agg == "mean":
            out[key] = sum(values) / len(values)
        elif agg == "count":
            out[key] = float(len(values))
        elif agg == "min":
            out[key] = min(values)
        else:
            out[key] = max(values)
    return out


def oracle_fold_events(events: list[dict], snapshot_id: str) -> dict:
    """Replay the raw event dicts into summary counts."""
    views = 0
    viewers = set()
    obfuscated = 0
    reshares = 0
    comments = 0
    interactions = 0
    active = 0
    reactions: dict[str, int] = {}
    per_channel: dict[str, int] = {}
    for e in events:
        if e["snapshotId"] != snapshot_id:
            continue
        kind = e["kind"]
        if kind == "view":
            views += 1
            if e.get("actorId"):
                viewers.add(e["actorId"])
            channel = e.get("channelId")
            if channel:
                per_channel[channel] = per_channel.get(channel, 0) + 1
        elif kind == "obfuscated-view":
            obfuscated += 1
        elif kind == "reshare":
            reshares += 1
        elif kind == "comment":
            comments += 1
        elif kind == "reaction":
            emoji = e["payload"]["emoji"]
            reactions[emoji] = reactions.get(emoji, 0) + 1
        elif kind == "interaction":
            interactions += 1
            if e["class"] == "active":
                active += 1
    return {
        "views": views,
        "uniqueViewers": len(viewers),
        "obfuscatedViews": obfuscated,
        "reshares": reshares,
        "comments": comments,
        "interactions": interactions,
        "activeCount": active,
        "reactions": dict(sorted(reactions.items())),
        "perChannel": dict(sorted(per_channel.items())),
    }
