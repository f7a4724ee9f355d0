"""Typed tabular datasets, dashboards, and selection resolution.

Datasets are immutable after load: a schema of dimension / measure /
temporal fields plus rows keyed by field name. Dashboards describe widgets
over those datasets; a creator's selection (measure, aggregate, dimensions,
filters, optional time frame) resolves against them into a small grouped
table that the template engine consumes.

Ingest formats: CSV (RFC 4180, UTF-8, header row required) and
json-records (array of flat objects). Dates are ISO-8601 calendar dates;
time-of-day is truncated on ingest.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, replace
from datetime import date, datetime
from typing import Any, Literal, Optional, Sequence

from .canonical import parse_iso_date
from .errors import NotFoundError, ValidationError
from .timeframe import (
    Bucket,
    DateRange,
    TimeFrame,
    WEEKDAYS,
    bucketize,
    resolve_range,
    restrict_weekdays,
    weekday_name,
)

FieldKind = Literal["dimension", "measure", "temporal"]
FilterOp = Literal["eq", "in", "range", "weekday-in"]
Aggregate = Literal["sum", "mean", "count", "min", "max"]
ChartKind = Literal["bar", "line", "area", "heatmap", "table", "single-value"]

AGGREGATES: tuple[Aggregate, ...] = ("sum", "mean", "count", "min", "max")
CHART_KINDS: tuple[ChartKind, ...] = ("bar", "line", "area", "heatmap", "table", "single-value")

_KIND_VALUE_TYPES = {"dimension": "text", "measure": "number", "temporal": "date"}
_DATE_SHAPE = re.compile(r"^\d{4}-\d{2}-\d{2}")


@dataclass(frozen=True)
class Field:
    name: str
    kind: FieldKind
    value_type: str = ""

    def __post_init__(self) -> None:
        if self.kind not in _KIND_VALUE_TYPES:
            raise ValidationError("InvalidField", f"unknown field kind {self.kind!r}")
        expected = _KIND_VALUE_TYPES[self.kind]
        if not self.value_type:
            object.__setattr__(self, "value_type", expected)
        elif self.value_type != expected:
            raise ValidationError(
                "InvalidField",
                f"field {self.name!r}: kind {self.kind} requires value type {expected}",
            )

    def to_dict(self) -> dict[str, str]:
        return {"name": self.name, "kind": self.kind, "valueType": self.value_type}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Field":
        return cls(data["name"], data["kind"], data.get("valueType", ""))


@dataclass(frozen=True)
class Dataset:
    id: str
    name: str
    schema: tuple[Field, ...]
    rows: tuple[dict[str, Any], ...]

    def field(self, name: str) -> Field:
        for f in self.schema:
            if f.name == name:
                return f
        raise NotFoundError("UnknownField", f"field {name!r} not in dataset {self.id}",
                            field=name, dataset=self.id)

    def has_field(self, name: str) -> bool:
        return any(f.name == name for f in self.schema)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "schema": [f.to_dict() for f in self.schema],
            "rows": [_serialize_row(row) for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Dataset":
        schema = tuple(Field.from_dict(f) for f in data["schema"])
        rows = tuple(_typed_row(row, schema) for row in data["rows"])
        return cls(data["id"], data["name"], schema, rows)


def _serialize_row(row: dict[str, Any]) -> dict[str, Any]:
    return {k: (v.isoformat() if isinstance(v, date) else v) for k, v in row.items()}


def _typed_row(row: dict[str, Any], schema: tuple[Field, ...]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in schema:
        value = row[f.name]
        if f.kind == "temporal" and isinstance(value, str):
            value = parse_iso_date(value, what=f"value of {f.name}")
        out[f.name] = value
    return out


@dataclass(frozen=True)
class FilterPredicate:
    field: str
    op: FilterOp
    value: Any

    def to_dict(self) -> dict[str, Any]:
        value = self.value
        if isinstance(value, (set, frozenset)):
            value = sorted(value)
        elif isinstance(value, tuple):
            value = list(value)
        if isinstance(value, list):
            value = [v.isoformat() if isinstance(v, date) else v for v in value]
        elif isinstance(value, date):
            value = value.isoformat()
        return {"field": self.field, "op": self.op, "value": value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FilterPredicate":
        try:
            op = data["op"]
            value = data["value"]
        except (KeyError, TypeError) as exc:
            raise ValidationError("InvalidFilter", f"bad filter predicate: {exc}") from exc
        if op not in ("eq", "in", "range", "weekday-in"):
            raise ValidationError("InvalidFilter", f"unknown filter op {op!r}")
        if op in ("in", "weekday-in"):
            if not isinstance(value, (list, set, frozenset)) or not value:
                raise ValidationError("InvalidFilter", f"{op} filter needs a non-empty set")
            value = frozenset(value)
        if op == "range":
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ValidationError("InvalidFilter", "range filter needs [lo, hi]")
            value = tuple(value)
        return cls(data["field"], op, value)

    def validate_against(self, ds: Dataset) -> None:
        f = ds.field(self.field)
        if self.op == "range" and f.kind == "dimension":
            raise ValidationError("KindMismatch",
                                  f"range filter not allowed on dimension {f.name!r}")
        if self.op == "weekday-in":
            if f.kind != "temporal":
                raise ValidationError("KindMismatch",
                                      f"weekday-in filter requires a temporal field, got {f.name!r}")
            bad = set(self.value) - set(WEEKDAYS)
            if bad:
                raise ValidationError("InvalidFilter", f"unknown weekdays: {sorted(bad)}")

    def matches(self, row: dict[str, Any]) -> bool:
        value = row[self.field]
        if self.op == "eq":
            return value == _coerce_like(value, self.value)
        if self.op == "in":
            return value in {_coerce_like(value, v) for v in self.value}
        if self.op == "range":
            lo = _coerce_like(value, self.value[0])
            hi = _coerce_like(value, self.value[1])
            return lo <= value <= hi
        return weekday_name(value) in self.value

    def describe(self) -> str:
        if self.op == "eq":
            return f"{self.field} = {self.value}"
        if self.op == "in":
            return f"{self.field} in {sorted(self.value)}"
        if self.op == "range":
            return f"{self.field} in [{self.value[0]}, {self.value[1]}]"
        return f"{self.field} on {sorted(self.value)}"


def _coerce_like(reference: Any, raw: Any) -> Any:
    """Filter values arrive as JSON scalars; line them up with column types."""
    if isinstance(reference, date) and isinstance(raw, str):
        return parse_iso_date(raw, what="filter value")
    if isinstance(reference, float) and isinstance(raw, (int, float)):
        return float(raw)
    return raw


@dataclass(frozen=True)
class ColorScale:
    """A named value-to-color mapping a dashboard can hand down to templates."""

    name: str
    kind: Literal["categorical", "sequential", "diverging"]
    mapping: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if self.kind not in ("categorical", "sequential", "diverging"):
            raise ValidationError("InvalidColorScale", f"unknown scale kind {self.kind!r}")

    def color_for(self, value: str) -> Optional[str]:
        for key, color in self.mapping:
            if key == value:
                return color
        return None

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "kind": self.kind, "mapping": dict(self.mapping)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ColorScale":
        mapping = tuple(sorted((str(k), str(v)) for k, v in data.get("mapping", {}).items()))
        return cls(data["name"], data["kind"], mapping)


@dataclass(frozen=True)
class Widget:
    id: str
    title: str
    chart_kind: ChartKind
    measures: tuple[str, ...]
    dataset_id: str
    dimensions: tuple[str, ...] = ()
    temporal_field: Optional[str] = None
    filters: tuple[FilterPredicate, ...] = ()
    color_scale: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "chartKind": self.chart_kind,
            "measures": list(self.measures),
            "dimensions": list(self.dimensions),
            "temporalField": self.temporal_field,
            "filters": [p.to_dict() for p in self.filters],
            "colorScale": self.color_scale,
            "datasetId": self.dataset_id,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Widget":
        if data.get("chartKind") not in CHART_KINDS:
            raise ValidationError("UnsupportedChartKind",
                                  f"unknown chart kind {data.get('chartKind')!r}")
        measures = tuple(data.get("measures") or ())
        if not measures:
            raise ValidationError("InvalidWidget", f"widget {data.get('id')!r} needs >=1 measure")
        dimensions = tuple(data.get("dimensions") or ())
        if len(dimensions) > 2:
            raise ValidationError("InvalidWidget", "widgets allow at most 2 dimensions")
        return cls(
            id=data["id"],
            title=data.get("title", data["id"]),
            chart_kind=data["chartKind"],
            measures=measures,
            dimensions=dimensions,
            temporal_field=data.get("temporalField"),
            filters=tuple(FilterPredicate.from_dict(p) for p in data.get("filters", [])),
            color_scale=data.get("colorScale"),
            dataset_id=data["datasetId"],
        )


@dataclass(frozen=True)
class Dashboard:
    id: str
    title: str
    widgets: tuple[Widget, ...]
    global_filters: tuple[FilterPredicate, ...] = ()
    color_scales: tuple[ColorScale, ...] = ()

    def widget(self, widget_id: str) -> Widget:
        for w in self.widgets:
            if w.id == widget_id:
                return w
        raise NotFoundError("UnknownWidget", f"widget {widget_id!r} not in dashboard {self.id}",
                            widget=widget_id, dashboard=self.id)

    def scale(self, name: str) -> ColorScale:
        for s in self.color_scales:
            if s.name == name:
                return s
        raise NotFoundError("UnknownColorScale", f"no color scale {name!r} in dashboard {self.id}",
                            scale=name, dashboard=self.id)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "widgets": [w.to_dict() for w in self.widgets],
            "globalFilters": [p.to_dict() for p in self.global_filters],
            "colorScales": {s.name: {"kind": s.kind, "mapping": dict(s.mapping)}
                            for s in self.color_scales},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], datasets: dict[str, Dataset]) -> "Dashboard":
        widgets = tuple(Widget.from_dict(w) for w in data.get("widgets", []))
        seen: set[str] = set()
        for w in widgets:
            if w.id in seen:
                raise ValidationError("InvalidDashboard", f"duplicate widget id {w.id!r}")
            seen.add(w.id)
        scales = tuple(
            ColorScale.from_dict({"name": name, **scale})
            for name, scale in sorted(data.get("colorScales", {}).items())
        )
        board = cls(
            id=data["id"],
            title=data.get("title", data["id"]),
            widgets=widgets,
            global_filters=tuple(FilterPredicate.from_dict(p)
                                 for p in data.get("globalFilters", [])),
            color_scales=scales,
        )
        board.validate(datasets)
        return board

    def validate(self, datasets: dict[str, Dataset]) -> None:
        scale_names = {s.name for s in self.color_scales}
        for w in self.widgets:
            ds = datasets.get(w.dataset_id)
            if ds is None:
                raise NotFoundError("UnknownDataset",
                                    f"widget {w.id!r} references unknown dataset {w.dataset_id!r}",
                                    dataset=w.dataset_id)
            for m in w.measures:
                if ds.field(m).kind != "measure":
                    raise ValidationError("KindMismatch", f"{m!r} is not a measure")
            for d in w.dimensions:
                if ds.field(d).kind != "dimension":
                    raise ValidationError("KindMismatch", f"{d!r} is not a dimension")
            if w.temporal_field and ds.field(w.temporal_field).kind != "temporal":
                raise ValidationError("KindMismatch", f"{w.temporal_field!r} is not temporal")
            for p in w.filters:
                p.validate_against(ds)
            if w.color_scale and w.color_scale not in scale_names:
                raise NotFoundError("UnknownColorScale",
                                    f"widget {w.id!r} references unknown scale {w.color_scale!r}",
                                    scale=w.color_scale)
            for p in self.global_filters:
                if ds.has_field(p.field):
                    p.validate_against(ds)


@dataclass(frozen=True)
class Selection:
    """What the creator picked: widget(s), measure, grouping, filters, frame."""

    dashboard_id: str
    widget_ids: tuple[str, ...]
    measure: str
    aggregate: Aggregate
    dataset_id: str
    dimensions: tuple[str, ...] = ()
    filters: tuple[FilterPredicate, ...] = ()
    time_frame: Optional[TimeFrame] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "dashboardId": self.dashboard_id,
            "widgetIds": list(self.widget_ids),
            "measure": self.measure,
            "aggregate": self.aggregate,
            "datasetId": self.dataset_id,
            "dimensions": list(self.dimensions),
            "filters": [p.to_dict() for p in self.filters],
            "timeFrame": self.time_frame.to_dict() if self.time_frame else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Selection":
        try:
            aggregate = data.get("aggregate", "sum")
            if aggregate not in AGGREGATES:
                raise ValidationError("InvalidSelection", f"unknown aggregate {aggregate!r}")
            tf = data.get("timeFrame")
            return cls(
                dashboard_id=data["dashboardId"],
                widget_ids=tuple(data.get("widgetIds") or ()),
                measure=data["measure"],
                aggregate=aggregate,
                dataset_id=data["datasetId"],
                dimensions=tuple(data.get("dimensions") or ()),
                filters=tuple(FilterPredicate.from_dict(p) for p in data.get("filters", [])),
                time_frame=TimeFrame.from_dict(tf) if tf else None,
            )
        except KeyError as exc:
            raise ValidationError("InvalidSelection", f"selection missing {exc}") from exc

    def validate(self, datasets: dict[str, Dataset]) -> Dataset:
        ds = datasets.get(self.dataset_id)
        if ds is None:
            raise NotFoundError("UnknownDataset", f"unknown dataset {self.dataset_id!r}",
                                dataset=self.dataset_id)
        if not self.widget_ids:
            raise ValidationError("InvalidSelection", "selection needs >=1 widget id")
        if len(self.dimensions) > 2:
            raise ValidationError("InvalidSelection", "selections allow at most 2 dimensions")
        if ds.field(self.measure).kind != "measure":
            raise ValidationError("NonNumericMeasure", f"{self.measure!r} is not a measure")
        for d in self.dimensions:
            if ds.field(d).kind != "dimension":
                raise ValidationError("KindMismatch", f"{d!r} is not a dimension")
        for p in self.filters:
            p.validate_against(ds)
        if self.time_frame and ds.field(self.time_frame.temporal_field).kind != "temporal":
            raise ValidationError("KindMismatch",
                                  f"{self.time_frame.temporal_field!r} is not temporal")
        return ds


@dataclass(frozen=True)
class TableRow:
    keys: tuple[str, ...]
    value: Optional[float]
    bucket: Optional[Bucket] = None
    value2: Optional[float] = None
    prior_bucket: Optional[Bucket] = None

    def to_dict(self, dimensions: tuple[str, ...]) -> dict[str, Any]:
        out: dict[str, Any] = dict(zip(dimensions, self.keys))
        if self.bucket is not None:
            out["bucket"] = self.bucket.label
            out["bucketStart"] = self.bucket.range.start.isoformat()
            out["bucketEnd"] = self.bucket.range.end.isoformat()
        out["value"] = self.value
        if self.value2 is not None or self.prior_bucket is not None:
            out["value2"] = self.value2
        if self.prior_bucket is not None:
            out["priorBucket"] = self.prior_bucket.label
            out["priorBucketStart"] = self.prior_bucket.range.start.isoformat()
            out["priorBucketEnd"] = self.prior_bucket.range.end.isoformat()
        return out


@dataclass(frozen=True)
class TableMeta:
    measure: str
    aggregate: Aggregate
    row_count_consumed: int
    range: Optional[DateRange] = None
    unit: Optional[str] = None
    second_measure: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "measure": self.measure,
            "aggregate": self.aggregate,
            "rowCountConsumed": self.row_count_consumed,
            "range": self.range.to_dict() if self.range else None,
            "unit": self.unit,
            "secondMeasure": self.second_measure,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TableMeta":
        rng = data.get("range")
        return cls(
            measure=data["measure"],
            aggregate=data["aggregate"],
            row_count_consumed=data["rowCountConsumed"],
            range=DateRange.from_dict(rng) if rng else None,
            unit=data.get("unit"),
            second_measure=data.get("secondMeasure"),
        )


@dataclass(frozen=True)
class ResolvedTable:
    """Grouped aggregation output: one row per observed group, ordered."""

    dimensions: tuple[str, ...]
    rows: tuple[TableRow, ...]
    meta: TableMeta

    @property
    def has_buckets(self) -> bool:
        return any(row.bucket is not None for row in self.rows)

    @property
    def is_empty(self) -> bool:
        return not self.rows

    def total(self) -> float:
        return sum(row.value for row in self.rows if row.value is not None)

    def inline_data(self) -> list[dict[str, Any]]:
        return [row.to_dict(self.dimensions) for row in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimensions": list(self.dimensions),
            "rows": self.inline_data(),
            "meta": self.meta.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResolvedTable":
        dimensions = tuple(data["dimensions"])
        rows = []
        for raw in data["rows"]:
            bucket = None
            if "bucket" in raw:
                bucket = Bucket.from_dict({"start": raw["bucketStart"],
                                           "end": raw["bucketEnd"],
                                           "label": raw["bucket"]})
            prior_bucket = None
            if "priorBucket" in raw:
                prior_bucket = Bucket.from_dict({"start": raw["priorBucketStart"],
                                                 "end": raw["priorBucketEnd"],
                                                 "label": raw["priorBucket"]})
            rows.append(TableRow(
                keys=tuple(raw[d] for d in dimensions),
                value=raw["value"],
                bucket=bucket,
                value2=raw.get("value2"),
                prior_bucket=prior_bucket,
            ))
        return cls(dimensions, tuple(rows), TableMeta.from_dict(data["meta"]))


# --- ingest ----------------------------------------------------------------

def load_dataset(source: bytes | str, fmt: Literal["csv", "json-records"],
                 schema_hint: Optional[dict[str, str]] = None, *,
                 dataset_id: str = "ds-1", name: str = "dataset") -> Dataset:
    """Parse and type a dataset from CSV or json-records bytes.

    Schema inference per column: every value numeric means measure, every
    value a valid ISO date means temporal, anything else is a dimension; a
    ``schema_hint`` mapping of field name to kind overrides inference.
    Zero-row sources need a hint covering every field, since inference has
    nothing to look at.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if fmt == "csv":
        names, raw_rows = _read_csv(source)
    elif fmt == "json-records":
        names, raw_rows = _read_json_records(source, schema_hint)
    else:
        raise ValidationError("InvalidFormat", f"unknown ingest format {fmt!r}")

    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ValidationError("DuplicateFieldName", f"duplicate field names: {sorted(dup)}")
    if not raw_rows and not (schema_hint and all(n in schema_hint for n in names)):
        raise ValidationError(
            "EmptySource",
            "no rows to infer a schema from; pass a schema hint covering every field",
        )

    schema = tuple(Field(n, _column_kind(n, raw_rows, schema_hint)) for n in names)
    rows = tuple(_type_raw_row(raw, line, schema) for line, raw in raw_rows)
    return Dataset(dataset_id, name, schema, rows)


def _read_csv(text: str) -> tuple[list[str], list[tuple[int, dict[str, str]]]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("EmptySource", "empty CSV stream") from None
    names = [h.strip() for h in header]
    if not any(names):
        raise ValidationError("EmptySource", "CSV header row is empty")
    rows: list[tuple[int, dict[str, str]]] = []
    for line_no, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(names):
            raise ValidationError("MalformedRow",
                                  f"line {line_no}: expected {len(names)} fields, got {len(record)}",
                                  line=line_no)
        rows.append((line_no, dict(zip(names, (v.strip() for v in record)))))
    return names, rows


def _read_json_records(text: str,
                       schema_hint: Optional[dict[str, str]]) -> tuple[list[str], list[tuple[int, dict[str, Any]]]]:
    try:
        records = json.loads(text) if text.strip() else []
    except json.JSONDecodeError as exc:
        raise ValidationError("MalformedRow", f"invalid JSON: {exc}") from exc
    if not isinstance(records, list):
        raise ValidationError("MalformedRow", "json-records source must be a JSON array")
    if not records:
        if schema_hint:
            return list(schema_hint), []
        raise ValidationError("EmptySource",
                              "empty json-records array needs a schema hint")
    names = list(records[0])
    rows: list[tuple[int, dict[str, Any]]] = []
    for index, record in enumerate(records, start=1):
        if not isinstance(record, dict) or set(record) != set(names):
            raise ValidationError("MalformedRow",
                                  f"record {index} does not match the first record's fields",
                                  line=index)
        for key, value in record.items():
            if value is None or isinstance(value, (dict, list, bool)):
                raise ValidationError("MalformedRow",
                                      f"record {index}: field {key!r} is not a flat scalar",
                                      line=index)
        rows.append((index, record))
    return names, rows


def _column_kind(name: str, raw_rows: Sequence[tuple[int, dict[str, Any]]],
                 schema_hint: Optional[dict[str, str]]) -> FieldKind:
    if schema_hint and name in schema_hint:
        kind = schema_hint[name]
        if kind not in _KIND_VALUE_TYPES:
            raise ValidationError("InvalidField", f"schema hint: unknown kind {kind!r}")
        return kind  # type: ignore[return-value]
    values = [raw[name] for _, raw in raw_rows]
    if all(_is_number(v) for v in values):
        return "measure"
    if all(_parses_as_date(v) for v in values):
        return "temporal"
    return "dimension"


def _is_number(value: Any) -> bool:
    if isinstance(value, (int, float)):
        return True
    try:
        float(str(value))
        return True
    except ValueError:
        return False


def _parses_as_date(value: Any) -> bool:
    try:
        _parse_temporal(str(value))
        return True
    except ValueError:
        return False


def _parse_temporal(text: str) -> date:
    # Timestamps with time-of-day are truncated to the calendar date.
    if "T" in text or " " in text:
        return datetime.fromisoformat(text.replace(" ", "T")).date()
    return date.fromisoformat(text)


def _type_raw_row(raw: dict[str, Any], line: int, schema: tuple[Field, ...]) -> dict[str, Any]:
    row: dict[str, Any] = {}
    for f in schema:
        value = raw[f.name]
        if f.kind == "measure":
            try:
                row[f.name] = float(value)
            except (TypeError, ValueError):
                raise ValidationError("MalformedRow",
                                      f"line {line}: {f.name!r} value {value!r} is not numeric",
                                      line=line, field=f.name) from None
        elif f.kind == "temporal":
            try:
                row[f.name] = _parse_temporal(str(value))
            except ValueError:
                raise ValidationError("UnparseableDate",
                                      f"line {line}: {f.name!r} value {value!r} is not a calendar date",
                                      line=line, field=f.name) from None
        else:
            if _DATE_SHAPE.match(str(value)) and not _parses_as_date(value):
                # Looks like a date but is not a real calendar day; refuse
                # rather than silently storing it as text.
                raise ValidationError("UnparseableDate",
                                      f"line {line}: {f.name!r} value {value!r} is not a calendar date",
                                      line=line, field=f.name)
            row[f.name] = str(value)
    return row


# --- filtering and aggregation ----------------------------------------------

def apply_filters(ds: Dataset, preds: Sequence[FilterPredicate]) -> list[dict[str, Any]]:
    """Conjunction of predicates, order-preserving over the dataset rows."""
    for p in preds:
        p.validate_against(ds)
    rows = list(ds.rows)
    for p in preds:
        rows = [row for row in rows if p.matches(row)]
    return rows


def aggregate(rows: Sequence[dict[str, Any]], measure: str, agg: Aggregate,
              group_by: Sequence[str] = (), buckets: Optional[Sequence[Bucket]] = None,
              temporal_field: Optional[str] = None, *,
              range_: Optional[DateRange] = None, unit: Optional[str] = None) -> ResolvedTable:
    """Group rows by dimension values (and time buckets) and fold the measure.

    Groups exist only where rows exist; aggregating zero rows yields an
    empty table rather than a fabricated zero. Ordering is deterministic:
    dimension values lexicographic, then buckets chronological.
    """
    if agg not in AGGREGATES:
        raise ValidationError("InvalidSelection", f"unknown aggregate {agg!r}")
    for row in rows:
        if not isinstance(row.get(measure), (int, float)):
            raise ValidationError("NonNumericMeasure",
                                  f"measure {measure!r} has non-numeric value {row.get(measure)!r}")

    groups: dict[tuple[tuple[str, ...], Optional[str]], list[float]] = {}
    bucket_by_label: dict[str, Bucket] = {}
    consumed = 0
    for row in rows:
        bucket: Optional[Bucket] = None
        if buckets is not None:
            assert temporal_field is not None
            bucket = _bucket_of(row[temporal_field], buckets)
            if bucket is None:
                continue
            bucket_by_label[bucket.label] = bucket
        keys = tuple(str(row[d]) for d in group_by)
        groups.setdefault((keys, bucket.label if bucket else None), []).append(float(row[measure]))
        consumed += 1

    out_rows = []
    for (keys, label), values in sorted(groups.items(),
                                        key=lambda item: (item[0][0], item[0][1] or "")):
        out_rows.append(TableRow(
            keys=keys,
            value=_fold(values, agg),
            bucket=bucket_by_label[label] if label is not None else None,
        ))
    meta = TableMeta(measure=measure, aggregate=agg, row_count_consumed=consumed,
                     range=range_, unit=unit)
    return ResolvedTable(tuple(group_by), tuple(out_rows), meta)


def _bucket_of(day: date, buckets: Sequence[Bucket]) -> Optional[Bucket]:
    for b in buckets:
        if day in b.range:
            return b
    return None


def _fold(values: list[float], agg: Aggregate) -> float:
    if agg == "sum":
        return float(sum(values))
    if agg == "mean":
        return float(sum(values)) / len(values)
    if agg == "count":
        return float(len(values))
    if agg == "min":
        return float(min(values))
    return float(max(values))


# --- selections --------------------------------------------------------------

def extract_selection(dashboard: Dashboard, widget_id: str,
                      overrides: Optional[dict[str, Any]] = None, *,
                      datasets: dict[str, Dataset]) -> Selection:
    """Assemble a selection from a widget's defaults plus creator overrides.

    Filters are the union of the dashboard's global filters and the
    widget's own; an override filter replaces any existing predicate on the
    same field, since the creator's intent wins on collisions.
    """
    widget = dashboard.widget(widget_id)
    ds = datasets.get(widget.dataset_id)
    if ds is None:
        raise NotFoundError("UnknownDataset", f"unknown dataset {widget.dataset_id!r}",
                            dataset=widget.dataset_id)
    overrides = overrides or {}
    unknown = set(overrides) - {"measure", "aggregate", "dimensions", "filters", "timeFrame"}
    if unknown:
        raise ValidationError("InvalidOverride", f"unknown override keys: {sorted(unknown)}")

    base_filters: list[FilterPredicate] = [
        p for p in dashboard.global_filters if ds.has_field(p.field)
    ]
    base_filters += list(widget.filters)
    if "filters" in overrides:
        replacement = [FilterPredicate.from_dict(p) for p in overrides["filters"]]
        replaced_fields = {p.field for p in replacement}
        base_filters = [p for p in base_filters if p.field not in replaced_fields]
        base_filters += replacement

    tf = None
    if overrides.get("timeFrame") is not None:
        tf = TimeFrame.from_dict(overrides["timeFrame"])

    selection = Selection(
        dashboard_id=dashboard.id,
        widget_ids=(widget_id,),
        measure=overrides.get("measure", widget.measures[0]),
        aggregate=overrides.get("aggregate", "sum"),
        dataset_id=widget.dataset_id,
        dimensions=tuple(overrides.get("dimensions", widget.dimensions)),
        filters=tuple(base_filters),
        time_frame=tf,
    )
    try:
        selection.validate(datasets)
    except (ValidationError, NotFoundError) as exc:
        raise ValidationError("InvalidOverride", f"override produced an invalid selection: {exc.message}",
                              cause=exc.code) from exc
    return selection


def resolve_selection(sel: Selection, datasets: dict[str, Dataset],
                      now: Optional[date] = None) -> ResolvedTable:
    """Filter, restrict to the time frame, bucket, and aggregate.

    Pure: the same selection over the same datasets always yields the same
    table. ``now`` is accepted for interface symmetry with update-time
    resolution but plays no part in the arithmetic (frames are anchored).
    """
    ds = sel.validate(datasets)
    rows = apply_filters(ds, sel.filters)
    buckets: Optional[list[Bucket]] = None
    range_: Optional[DateRange] = None
    unit: Optional[str] = None
    if sel.time_frame is not None:
        tf = sel.time_frame
        range_ = resolve_range(tf)
        rows = [row for row in rows if row[tf.temporal_field] in range_]
        rows = restrict_weekdays(rows, tf)
        buckets = bucketize(range_, tf.bucket_unit)
        unit = tf.bucket_unit
        return aggregate(rows, sel.measure, sel.aggregate, sel.dimensions,
                         buckets, tf.temporal_field, range_=range_, unit=unit)
    return aggregate(rows, sel.measure, sel.aggregate, sel.dimensions)


def paired_by_group(primary: ResolvedTable, secondary: ResolvedTable,
                    second_measure: str) -> ResolvedTable:
    """Join two resolutions on identical group keys (inner join).

    Used for measure-vs-measure templates: each row gains the second
    measure's value as ``value2``.
    """
    index = {(row.keys, row.bucket.label if row.bucket else None): row.value
             for row in secondary.rows}
    rows = []
    for row in primary.rows:
        key = (row.keys, row.bucket.label if row.bucket else None)
        if key in index:
            rows.append(replace(row, value2=index[key]))
    meta = replace(primary.meta, second_measure=second_measure)
    return ResolvedTable(primary.dimensions, tuple(rows), meta)


def paired_by_index(current: ResolvedTable, prior: ResolvedTable) -> ResolvedTable:
    """Align two bucketed series positionally (bucket 1 with bucket 1, ...).

    Used for period-over-period comparison, where calendar labels differ
    between the two windows but positions correspond.
    """
    rows = []
    length = max(len(current.rows), len(prior.rows))
    for i in range(length):
        cur = current.rows[i] if i < len(current.rows) else None
        pre = prior.rows[i] if i < len(prior.rows) else None
        rows.append(TableRow(
            keys=cur.keys if cur else (pre.keys if pre else ()),
            value=cur.value if cur else None,
            bucket=cur.bucket if cur else (pre.bucket if pre else None),
            value2=pre.value if pre else None,
            prior_bucket=pre.bucket if pre else None,
        ))
    return ResolvedTable(current.dimensions, tuple(rows), current.meta)
