"""Task-driven chart/caption templates over resolved tables.

Each template turns a resolved table plus parameters into a declarative
chart spec and a one-sentence caption. Specs are plain data (mark, layers,
encodings, inline rows, responsive size variants) serialized through the
canonical JSON encoding, so golden-file tests and the UI renderer share a
single contract.

Formatting rules are fixed so output is deterministic: percents get one
decimal place, derived ratios at most three significant digits, magnitudes
of 1000 and above get thousands separators. Every numeral appearing in a
caption is the formatted form of an entry in the caption's stats.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from typing import Any, Literal, Optional

from .datacore import ChartKind, ColorScale, ResolvedTable, Widget
from .errors import ValidationError
from .timeframe import Span

TemplateKind = Literal[
    "categorical-breakdown",
    "goal-breakdown",
    "ratio-breakdown",
    "time-series",
    "value-vs-threshold",
    "series-vs-threshold",
    "time-over-time",
    "trend-correlation",
    "preserve-original",
]

TEMPLATE_KINDS: tuple[TemplateKind, ...] = (
    "categorical-breakdown",
    "goal-breakdown",
    "ratio-breakdown",
    "time-series",
    "value-vs-threshold",
    "series-vs-threshold",
    "time-over-time",
    "trend-correlation",
    "preserve-original",
)

SizeClass = Literal["narrow", "medium", "wide"]
SIZE_CLASSES: tuple[SizeClass, ...] = ("narrow", "medium", "wide")

# Breakpoints follow common device widths; below 320px is phone-peripheral.
NARROW_MAX_WIDTH = 320
MEDIUM_MAX_WIDTH = 600

SIZE_VARIANTS: dict[str, dict[str, Any]] = {
    "narrow": {"maxTicks": 4, "legendVisible": False, "labelLimit": 8},
    "medium": {"maxTicks": 7, "legendVisible": True, "labelLimit": None},
    "wide": {"maxTicks": None, "legendVisible": True, "labelLimit": None},
}

# Pearson-r cutoffs for trend wording; pinned by tests.
TREND_R_THRESHOLD = 0.1

# Deterministic fallback cycle for categorical values a scale does not map.
FALLBACK_COLORS = (
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
    "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
)

CURRENT_SERIES_COLOR = "#4c78a8"
PRIOR_SERIES_COLOR = "#9ecae9"
BAND_COLOR = "#f2e9c9"


def size_class_for_width(width_px: int) -> SizeClass:
    if width_px < NARROW_MAX_WIDTH:
        return "narrow"
    if width_px < MEDIUM_MAX_WIDTH:
        return "medium"
    return "wide"


@dataclass(frozen=True)
class TemplateParams:
    goal: Optional[float] = None
    threshold: Optional[tuple[float, float]] = None
    comparison_offset: Optional[Span] = None
    breakdown_dimension: Optional[str] = None
    second_measure: Optional[str] = None
    top_n: Optional[int] = None
    include_chart: bool = True
    include_caption: bool = True

    def __post_init__(self) -> None:
        if not (self.include_chart or self.include_caption):
            raise ValidationError("InvalidParams",
                                  "a component must include a chart, a caption, or both")
        if self.threshold is not None:
            lo, hi = self.threshold
            if lo > hi:
                raise ValidationError("InvalidParams", f"threshold low {lo} exceeds high {hi}")
        if self.top_n is not None and self.top_n < 1:
            raise ValidationError("InvalidParams", "topN must be a positive integer")

    def to_dict(self) -> dict[str, Any]:
        return {
            "goal": self.goal,
            "threshold": list(self.threshold) if self.threshold else None,
            "comparisonOffset": self.comparison_offset.to_dict() if self.comparison_offset else None,
            "breakdownDimension": self.breakdown_dimension,
            "secondMeasure": self.second_measure,
            "topN": self.top_n,
            "includeChart": self.include_chart,
            "includeCaption": self.include_caption,
        }

    @classmethod
    def from_dict(cls, data: Optional[dict[str, Any]]) -> "TemplateParams":
        data = data or {}
        threshold = data.get("threshold")
        offset = data.get("comparisonOffset")
        return cls(
            goal=data.get("goal"),
            threshold=tuple(threshold) if threshold else None,
            comparison_offset=Span.from_dict(offset) if offset else None,
            breakdown_dimension=data.get("breakdownDimension"),
            second_measure=data.get("secondMeasure"),
            top_n=data.get("topN"),
            include_chart=data.get("includeChart", True),
            include_caption=data.get("includeCaption", True),
        )


@dataclass(frozen=True)
class ChartSpec:
    """Declarative chart: layered marks, encodings, inline data, variants."""

    mark: str
    layers: tuple[dict[str, Any], ...]
    encodings: dict[str, Any]
    inline_data: tuple[dict[str, Any], ...]
    color_scale: Optional[dict[str, Any]] = None
    size: Optional[SizeClass] = None
    best_effort: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "mark": self.mark,
            "layers": [dict(layer) for layer in self.layers],
            "encodings": self.encodings,
            "inlineData": [dict(row) for row in self.inline_data],
            "sizeVariants": SIZE_VARIANTS,
            "colorScale": self.color_scale,
            "size": self.size,
            "bestEffort": self.best_effort,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChartSpec":
        return cls(
            mark=data["mark"],
            layers=tuple(data["layers"]),
            encodings=data["encodings"],
            inline_data=tuple(data["inlineData"]),
            color_scale=data.get("colorScale"),
            size=data.get("size"),
            best_effort=data.get("bestEffort", False),
        )


@dataclass(frozen=True)
class Caption:
    text: str
    stats: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"text": self.text, "stats": self.stats}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Caption":
        return cls(data["text"], data["stats"])


# --- number formatting -------------------------------------------------------

def format_quantity(value: float) -> str:
    """Magnitudes: integers plain, decimals to 2 places, separators >= 1000."""
    if abs(value - round(value)) < 1e-9:
        return f"{int(round(value)):,}"
    text = f"{value:,.2f}".rstrip("0").rstrip(".")
    return text


def format_percent(fraction: float) -> str:
    return f"{fraction * 100:.1f}%"


def format_signed_percent(fraction: float) -> str:
    return f"{fraction * 100:+.1f}%"


def format_ratio(value: float) -> str:
    return f"{value:.3g}"


# --- template instantiation ---------------------------------------------------

_REQUIRED_PARAMS: dict[str, tuple[str, ...]] = {
    "goal-breakdown": ("goal",),
    "value-vs-threshold": ("threshold",),
    "series-vs-threshold": ("threshold",),
    "time-over-time": ("comparison_offset",),
    "trend-correlation": ("second_measure",),
}


def instantiate(kind: TemplateKind, table: ResolvedTable, params: TemplateParams,
                scale: Optional[ColorScale] = None) -> tuple[ChartSpec, Caption]:
    """Build the chart spec and caption for a template kind.

    Deterministic: identical inputs serialize byte-identically. Raises
    ShapeMismatch when the table does not fit the kind, MissingParam for
    absent required parameters, EmptyTable on empty input.
    """
    _check_kind(kind)
    if kind == "preserve-original":
        raise ValidationError("ShapeMismatch",
                              "preserve-original bypasses templating; use preserve_original()")
    for attr in _REQUIRED_PARAMS.get(kind, ()):
        if getattr(params, attr) is None:
            name = {"comparison_offset": "comparisonOffset",
                    "second_measure": "secondMeasure"}.get(attr, attr)
            raise ValidationError("MissingParam", f"{kind} requires parameter {name!r}",
                                  param=name)
    if table.is_empty:
        raise ValidationError("EmptyTable", f"cannot instantiate {kind} over an empty table")

    # Stats validation doubles as the shape check, so it runs first.
    stats = render_caption_stats(kind, table, params)
    caption = Caption(_caption_text(kind, table, params, stats), stats)
    spec = _BUILDERS[kind](table, params)
    if scale is not None and spec.encodings.get("color"):
        spec = apply_color_scale(spec, scale)
    return spec, caption


def _check_kind(kind: str) -> None:
    if kind not in TEMPLATE_KINDS:
        raise ValidationError("UnknownTemplateKind", f"unknown template kind {kind!r}")


def render_caption_stats(kind: TemplateKind, table: ResolvedTable,
                         params: TemplateParams) -> dict[str, Any]:
    """The raw named numbers a caption is built from, before formatting."""
    _check_kind(kind)
    if table.is_empty:
        raise ValidationError("EmptyTable", "no rows to summarize")

    if kind in ("categorical-breakdown", "ratio-breakdown"):
        _require_shape(kind, len(table.dimensions) == 1 and not table.has_buckets,
                       "exactly one dimension and no time buckets")
        total = table.total()
        best = max(row.value for row in table.rows)
        leaders = sorted(row.keys[0] for row in table.rows if row.value == best)
        share = best / total if total else 1.0
        return {"total": total, "leader": _join_leaders(leaders),
                "leaderValue": best, "share": share}

    if kind == "goal-breakdown":
        _require_shape(kind, len(table.dimensions) <= 1, "a scalar or one dimension")
        value = table.total()
        return {"value": value, "goal": params.goal,
                "pctToGoal": value / params.goal if params.goal else 0.0}

    if kind == "time-series":
        _require_shape(kind, table.has_buckets and len(table.dimensions) <= 1,
                       "time buckets with at most one dimension")
        by_bucket: dict[str, float] = {}
        for row in table.rows:
            if row.bucket is not None and row.value is not None:
                by_bucket[row.bucket.label] = by_bucket.get(row.bucket.label, 0.0) + row.value
        labels = sorted(by_bucket)
        return {"total": sum(by_bucket.values()), "buckets": len(labels),
                "latest": by_bucket[labels[-1]]}

    if kind == "value-vs-threshold":
        _require_shape(kind, len(table.dimensions) <= 1, "a scalar or one dimension")
        lo, hi = params.threshold
        return {"value": table.total(), "low": lo, "high": hi}

    if kind == "series-vs-threshold":
        _require_shape(kind, table.has_buckets and not table.dimensions,
                       "time buckets without dimensions")
        lo, hi = params.threshold
        values = [row.value for row in table.rows if row.value is not None]
        outside = sum(1 for v in values if v < lo or v > hi)
        return {"points": len(values), "outside": outside, "low": lo, "high": hi}

    if kind == "time-over-time":
        _require_shape(kind, table.has_buckets and _has_pairs(table),
                       "positionally paired current and prior series")
        current = sum(row.value for row in table.rows if row.value is not None)
        prior = sum(row.value2 for row in table.rows if row.value2 is not None)
        delta = (current - prior) / prior if prior else None
        return {"currentTotal": current, "priorTotal": prior, "delta": delta}

    if kind == "trend-correlation":
        _require_shape(kind, _has_pairs(table), "two measures per group")
        xs = [row.value for row in table.rows if row.value is not None and row.value2 is not None]
        ys = [row.value2 for row in table.rows if row.value is not None and row.value2 is not None]
        r, slope, intercept = _fit(xs, ys)
        return {"r": r, "slope": slope, "intercept": intercept, "points": len(xs)}

    raise ValidationError("ShapeMismatch", f"{kind} has no caption")


def _has_pairs(table: ResolvedTable) -> bool:
    return any(row.value2 is not None for row in table.rows)


def _require_shape(kind: str, ok: bool, expected: str) -> None:
    if not ok:
        raise ValidationError("ShapeMismatch", f"{kind} expects {expected}", kind=kind)


def _join_leaders(leaders: list[str]) -> str:
    if len(leaders) == 1:
        return leaders[0]
    return " and ".join([", ".join(leaders[:-1]), leaders[-1]])


def _fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Pearson r and least-squares line, total over degenerate inputs."""
    if len(xs) < 2:
        return 0.0, 0.0, ys[0] if ys else 0.0
    try:
        slope, intercept = statistics.linear_regression(xs, ys)
        r = statistics.correlation(xs, ys)
    except statistics.StatisticsError:
        return 0.0, 0.0, statistics.fmean(ys)
    return r, slope, intercept


def _caption_text(kind: TemplateKind, table: ResolvedTable, params: TemplateParams,
                  stats: dict[str, Any]) -> str:
    if kind == "categorical-breakdown":
        verb = "leads" if " and " not in stats["leader"] else "lead jointly"
        return (f"{stats['leader']} {verb} with {format_quantity(stats['leaderValue'])} "
                f"({format_percent(stats['share'])} of {format_quantity(stats['total'])}).")
    if kind == "goal-breakdown":
        return (f"{format_quantity(stats['value'])} reaches "
                f"{format_percent(stats['pctToGoal'])} of goal "
                f"{format_quantity(stats['goal'])}.")
    if kind == "ratio-breakdown":
        return (f"{stats['leader']} accounts for {format_percent(stats['share'])} "
                f"of {format_quantity(stats['total'])}.")
    if kind == "time-series":
        unit = table.meta.unit or "bucket"
        count = stats["buckets"]
        plural = "" if count == 1 else "s"
        return (f"The series totals {format_quantity(stats['total'])} over "
                f"{count} {unit}{plural}, with the latest at "
                f"{format_quantity(stats['latest'])}.")
    if kind == "value-vs-threshold":
        value, lo, hi = stats["value"], stats["low"], stats["high"]
        if value < lo:
            position = "below"
        elif value > hi:
            position = "above"
        else:
            position = "within"
        return (f"Value {format_quantity(value)} is {position} the range "
                f"{format_quantity(lo)} to {format_quantity(hi)}.")
    if kind == "series-vs-threshold":
        lo, hi = stats["low"], stats["high"]
        if stats["outside"] == 0:
            return (f"All {stats['points']} points are within the range "
                    f"{format_quantity(lo)} to {format_quantity(hi)}.")
        return (f"{stats['outside']} of {stats['points']} points fall outside "
                f"the range {format_quantity(lo)} to {format_quantity(hi)}.")
    if kind == "time-over-time":
        if stats["delta"] is None:
            return (f"Current total {format_quantity(stats['currentTotal'])} has "
                    f"no prior-period baseline (prior total 0).")
        return (f"Current total {format_quantity(stats['currentTotal'])} is "
                f"{format_signed_percent(stats['delta'])} vs the prior period "
                f"({format_quantity(stats['priorTotal'])}).")
    r = stats["r"]
    if r > TREND_R_THRESHOLD:
        word = "increasing"
    elif r < -TREND_R_THRESHOLD:
        word = "decreasing"
    else:
        word = "flat"
    return f"The trend is {word} (r={format_ratio(r)})."


# --- per-kind chart builders --------------------------------------------------

def _build_categorical(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    dim = table.dimensions[0]
    rows = sorted(table.inline_data(), key=lambda r: (-r["value"], r[dim]))
    if params.top_n is not None:
        rows = rows[: params.top_n]
    encodings = {
        "x": _axis(dim, "nominal"),
        "y": _axis("value", "quantitative"),
        "color": _color(dim, "nominal"),
    }
    return ChartSpec(mark="bar",
                     layers=({"mark": "bar", "encodings": encodings},),
                     encodings=encodings, inline_data=tuple(rows))


def _build_goal(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    total = table.total()
    rows = [dict(row, goal=params.goal) for row in table.inline_data()]
    bar = {
        "x": _axis("value", "quantitative", domain=[0.0, max(params.goal, total)]),
        "y": _axis(table.dimensions[0], "nominal") if table.dimensions else None,
        "color": _color(table.dimensions[0], "nominal") if table.dimensions else None,
    }
    bar = {k: v for k, v in bar.items() if v is not None}
    goal_rule = {"x": _axis("goal", "quantitative")}
    return ChartSpec(mark="bar",
                     layers=({"mark": "bar", "encodings": bar},
                             {"mark": "line", "encodings": goal_rule}),
                     encodings=bar, inline_data=tuple(rows))


def _build_ratio(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    dim = table.dimensions[0]
    total = table.total()
    rows = []
    for row in sorted(table.inline_data(), key=lambda r: (-r["value"], r[dim])):
        rows.append(dict(row, share=(row["value"] / total) if total else 0.0))
    encodings = {
        "x": _axis("share", "quantitative", domain=[0.0, 1.0]),
        "color": _color(dim, "nominal"),
    }
    return ChartSpec(mark="bar",
                     layers=({"mark": "bar", "encodings": encodings, "stacked": True},),
                     encodings=encodings, inline_data=tuple(rows))


def _build_time_series(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    encodings = {
        "x": _axis("bucket", "temporal"),
        "y": _axis("value", "quantitative"),
    }
    if table.dimensions:
        encodings["color"] = _color(table.dimensions[0], "nominal")
    return ChartSpec(mark="line",
                     layers=({"mark": "line", "encodings": encodings},),
                     encodings=encodings, inline_data=tuple(table.inline_data()))


def _build_value_threshold(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    lo, hi = params.threshold
    value = table.total()
    rows = [{"value": value, "thresholdLow": lo, "thresholdHigh": hi}]
    big = {"text": _axis("value", "quantitative")}
    band = {"y": _axis("thresholdLow", "quantitative"),
            "y2": _axis("thresholdHigh", "quantitative"),
            "color": {"value": BAND_COLOR}}
    return ChartSpec(mark="text",
                     layers=({"mark": "band", "encodings": band},
                             {"mark": "text", "encodings": big}),
                     encodings=big, inline_data=tuple(rows))


def _build_series_threshold(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    lo, hi = params.threshold
    rows = [dict(row, thresholdLow=lo, thresholdHigh=hi) for row in table.inline_data()]
    line = {"x": _axis("bucket", "temporal"), "y": _axis("value", "quantitative")}
    band = {"y": _axis("thresholdLow", "quantitative"),
            "y2": _axis("thresholdHigh", "quantitative"),
            "color": {"value": BAND_COLOR}}
    return ChartSpec(mark="line",
                     layers=({"mark": "band", "encodings": band},
                             {"mark": "line", "encodings": line}),
                     encodings=line, inline_data=tuple(rows))


def _build_time_over_time(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    current = {"x": _axis("bucket", "temporal"),
               "y": _axis("value", "quantitative"),
               "color": {"value": CURRENT_SERIES_COLOR, "label": "current"}}
    prior = {"x": _axis("bucket", "temporal"),
             "y": _axis("value2", "quantitative"),
             "color": {"value": PRIOR_SERIES_COLOR, "label": "prior"}}
    return ChartSpec(mark="line",
                     layers=({"mark": "line", "encodings": prior},
                             {"mark": "line", "encodings": current}),
                     encodings=current, inline_data=tuple(table.inline_data()))


def _build_trend(table: ResolvedTable, params: TemplateParams) -> ChartSpec:
    pairs = [(row.value, row.value2) for row in table.rows
             if row.value is not None and row.value2 is not None]
    _, slope, intercept = _fit([p[0] for p in pairs], [p[1] for p in pairs])
    rows = []
    for row in table.inline_data():
        if row.get("value") is None or row.get("value2") is None:
            continue
        rows.append(dict(row, trend=intercept + slope * row["value"]))
    scatter = {"x": _axis("value", "quantitative"),
               "y": _axis("value2", "quantitative")}
    fit_line = {"x": _axis("value", "quantitative"),
                "y": _axis("trend", "quantitative")}
    return ChartSpec(mark="point",
                     layers=({"mark": "point", "encodings": scatter},
                             {"mark": "line", "encodings": fit_line}),
                     encodings=scatter, inline_data=tuple(rows))


_BUILDERS = {
    "categorical-breakdown": _build_categorical,
    "goal-breakdown": _build_goal,
    "ratio-breakdown": _build_ratio,
    "time-series": _build_time_series,
    "value-vs-threshold": _build_value_threshold,
    "series-vs-threshold": _build_series_threshold,
    "time-over-time": _build_time_over_time,
    "trend-correlation": _build_trend,
}


def _axis(field: str, kind: str, domain: Optional[list[float]] = None) -> dict[str, Any]:
    axis: dict[str, Any] = {"field": field, "type": kind,
                            "maxTicks": None, "labelLimit": None}
    if domain is not None:
        axis["domain"] = domain
    return axis


def _color(field: str, kind: str) -> dict[str, Any]:
    return {"field": field, "type": kind, "legend": True, "scale": None}


# --- responsiveness, color scales, preservation -------------------------------

def responsive_variant(spec: ChartSpec, size: SizeClass) -> ChartSpec:
    """Apply a size class: tick budgets, label elision, legend visibility.

    Wide is the identity; narrow and medium return adjusted copies with the
    ``size`` field set. Marks are never changed, only encoding hints.
    """
    if size not in SIZE_CLASSES:
        raise ValidationError("InvalidSizeClass", f"unknown size class {size!r}")
    if size == "wide":
        return spec
    variant = SIZE_VARIANTS[size]
    encodings = _apply_variant(spec.encodings, variant)
    layers = tuple(dict(layer, encodings=_apply_variant(layer["encodings"], variant))
                   for layer in spec.layers)
    return replace(spec, encodings=encodings, layers=layers, size=size)


def _apply_variant(encodings: dict[str, Any], variant: dict[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for channel, enc in encodings.items():
        enc = dict(enc)
        if channel in ("x", "y", "y2") and "field" in enc:
            enc["maxTicks"] = variant["maxTicks"]
            enc["labelLimit"] = variant["labelLimit"]
        if channel == "color" and "legend" in enc:
            enc["legend"] = variant["legendVisible"]
        out[channel] = enc
    return out


def apply_color_scale(spec: ChartSpec, scale: ColorScale) -> ChartSpec:
    """Bind a dashboard color scale to the spec's color encoding.

    The scale kind must match the encoding type (categorical for nominal
    encodings, sequential or diverging for quantitative ones). Observed
    categorical values missing from the scale get colors from a fixed
    fallback cycle and are reported in the bound scale descriptor.
    """
    color = spec.encodings.get("color")
    if not color or "field" not in color:
        raise ValidationError("IncompatibleScaleKind",
                              "spec has no field-bound color encoding to apply a scale to")
    encoding_type = color.get("type")
    if encoding_type == "nominal" and scale.kind != "categorical":
        raise ValidationError("IncompatibleScaleKind",
                              f"{scale.kind} scale cannot color a categorical encoding")
    if encoding_type == "quantitative" and scale.kind == "categorical":
        raise ValidationError("IncompatibleScaleKind",
                              "categorical scale cannot color a quantitative encoding")

    mapping = dict(scale.mapping)
    fallback_assigned: list[str] = []
    if encoding_type == "nominal":
        observed = sorted({str(row[color["field"]]) for row in spec.inline_data
                           if color["field"] in row})
        cursor = 0
        for value in observed:
            if value not in mapping:
                mapping[value] = FALLBACK_COLORS[cursor % len(FALLBACK_COLORS)]
                cursor += 1
                fallback_assigned.append(value)

    bound = {"name": scale.name, "kind": scale.kind, "mapping": mapping,
             "fallbackAssigned": fallback_assigned}
    encodings = dict(spec.encodings)
    encodings["color"] = dict(color, scale=scale.name)
    layers = tuple(
        dict(layer, encodings=dict(layer["encodings"],
                                   color=dict(layer["encodings"]["color"], scale=scale.name)))
        if "color" in layer["encodings"] and "field" in layer["encodings"]["color"]
        else layer
        for layer in spec.layers
    )
    return replace(spec, encodings=encodings, layers=layers, color_scale=bound)


_PRESERVE_MARKS: dict[ChartKind, str] = {
    "bar": "bar",
    "line": "line",
    "area": "area",
    "heatmap": "point",
    "table": "table",
    "single-value": "text",
}


def preserve_original(widget: Widget, table: ResolvedTable) -> ChartSpec:
    """Mirror the widget's own representation instead of applying a template.

    Size variants are still attached but the spec is flagged best-effort:
    arbitrary dashboard charts respond to small screens less predictably
    than templates do.
    """
    mark = _PRESERVE_MARKS.get(widget.chart_kind)
    if mark is None:
        raise ValidationError("UnsupportedChartKind",
                              f"cannot preserve chart kind {widget.chart_kind!r}")
    rows = table.inline_data()
    encodings: dict[str, Any] = {}
    if widget.chart_kind == "single-value":
        encodings = {"text": _axis("value", "quantitative")}
    elif widget.chart_kind == "heatmap":
        dims = list(table.dimensions)
        x = dims[0] if dims else "bucket"
        y = dims[1] if len(dims) > 1 else "value"
        encodings = {
            "x": _axis(x, "nominal"),
            "y": _axis(y, "nominal" if len(dims) > 1 else "quantitative"),
            "color": _color("value", "quantitative"),
        }
    elif widget.chart_kind == "table":
        encodings = {"columns": {"fields": list(table.dimensions)
                                 + (["bucket"] if table.has_buckets else []) + ["value"]}}
    else:
        x = "bucket" if table.has_buckets else (
            table.dimensions[0] if table.dimensions else "value")
        encodings = {
            "x": _axis(x, "temporal" if table.has_buckets else "nominal"),
            "y": _axis("value", "quantitative"),
        }
        if table.dimensions and table.has_buckets:
            encodings["color"] = _color(table.dimensions[0], "nominal")
        elif table.dimensions and not table.has_buckets:
            encodings["color"] = _color(table.dimensions[0], "nominal")
    return ChartSpec(mark=mark,
                     layers=({"mark": mark, "encodings": encodings},),
                     encodings=encodings, inline_data=tuple(rows),
                     best_effort=True)
