"""Snapshot composition, immutable versioning, status, and updates.

Draft components are editable; once composed into a snapshot they are
frozen inside an immutable version record. Updates never touch stored
versions: they advance each component's time frame, re-resolve the data,
re-instantiate the template, drop annotations (and with them any
creator-authored notes), keep the interactivity controls, and append a new
version.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from datetime import date, timedelta
from typing import Any, Literal, Optional

from .canonical import parse_iso_date
from .datacore import (
    ColorScale,
    Dashboard,
    Dataset,
    ResolvedTable,
    Selection,
    Widget,
    paired_by_group,
    paired_by_index,
    resolve_selection,
)
from .errors import Conflict, Forbidden, NotFoundError, ValidationError
from .templates import (
    Caption,
    ChartSpec,
    TemplateKind,
    TemplateParams,
    TEMPLATE_KINDS,
    apply_color_scale,
    instantiate,
    preserve_original,
)
from .timeframe import TimeFrame, add_units, advance, detect_gaps, infer_freshness

CurationKind = Literal["stack", "carousel", "slideshow", "mini-dashboard"]
UpdateTrigger = Literal["scheduled", "manual", "consumer"]

DEFAULT_SLIDESHOW_INTERVAL_S = 5


@dataclass(frozen=True)
class Annotation:
    """Visual emphasis on a component: shape or note.

    Anchors are component-relative [0,1]^2 coordinates by default; an
    anchor carrying ``"space": "data"`` positions against data values
    instead (category names, measure values) and skips the unit-box check.
    """

    kind: Literal["circle", "rect", "arrow", "line", "note"]
    anchor: dict[str, Any]
    author_id: str
    text: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "rect", "arrow", "line", "note"):
            raise ValidationError("InvalidAnnotation", f"unknown annotation kind {self.kind!r}")
        if self.kind == "note" and not self.text:
            raise ValidationError("InvalidAnnotation", "note annotations require text")
        if self.anchor.get("space") == "data":
            return
        for key, value in self.anchor.items():
            if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
                raise ValidationError("InvalidAnnotation",
                                      f"anchor coordinate {key}={value!r} outside [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "anchor": self.anchor,
                "text": self.text, "authorId": self.author_id}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Annotation":
        try:
            return cls(kind=data["kind"], anchor=dict(data["anchor"]),
                       author_id=data["authorId"], text=data.get("text"))
        except KeyError as exc:
            raise ValidationError("InvalidAnnotation", f"annotation missing {exc}") from exc


@dataclass(frozen=True)
class InteractivityControl:
    """A curated filter consumers may apply privately."""

    id: str
    field: str
    allowed_values: tuple[str, ...]
    default_value: str
    is_call_to_action: bool = False

    def __post_init__(self) -> None:
        if not self.allowed_values:
            raise ValidationError("InvalidControl", "control needs >=1 allowed value")
        if self.default_value not in self.allowed_values:
            raise ValidationError("InvalidControl",
                                  f"default {self.default_value!r} not among allowed values")

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "field": self.field,
                "allowedValues": list(self.allowed_values),
                "defaultValue": self.default_value,
                "isCallToAction": self.is_call_to_action}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "InteractivityControl":
        try:
            return cls(id=data["id"], field=data["field"],
                       allowed_values=tuple(data["allowedValues"]),
                       default_value=data["defaultValue"],
                       is_call_to_action=data.get("isCallToAction", False))
        except KeyError as exc:
            raise ValidationError("InvalidControl", f"control missing {exc}") from exc


@dataclass(frozen=True)
class SnapshotComponent:
    id: str
    selection: Selection
    template_kind: TemplateKind
    params: TemplateParams
    table: ResolvedTable
    chart_spec: Optional[ChartSpec]
    caption: Optional[Caption]
    annotations: tuple[Annotation, ...] = ()
    controls: tuple[InteractivityControl, ...] = ()
    color_scale: Optional[ColorScale] = None

    @property
    def time_frame(self) -> Optional[TimeFrame]:
        return self.selection.time_frame

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "selection": self.selection.to_dict(),
            "templateKind": self.template_kind,
            "params": self.params.to_dict(),
            "table": self.table.to_dict(),
            "chartSpec": self.chart_spec.to_dict() if self.chart_spec else None,
            "caption": self.caption.to_dict() if self.caption else None,
            "annotations": [a.to_dict() for a in self.annotations],
            "controls": [c.to_dict() for c in self.controls],
            "colorScale": self.color_scale.to_dict() if self.color_scale else None,
            "timeFrame": self.time_frame.to_dict() if self.time_frame else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SnapshotComponent":
        scale = data.get("colorScale")
        return cls(
            id=data["id"],
            selection=Selection.from_dict(data["selection"]),
            template_kind=data["templateKind"],
            params=TemplateParams.from_dict(data["params"]),
            table=ResolvedTable.from_dict(data["table"]),
            chart_spec=ChartSpec.from_dict(data["chartSpec"]) if data.get("chartSpec") else None,
            caption=Caption.from_dict(data["caption"]) if data.get("caption") else None,
            annotations=tuple(Annotation.from_dict(a) for a in data.get("annotations", [])),
            controls=tuple(InteractivityControl.from_dict(c) for c in data.get("controls", [])),
            color_scale=ColorScale.from_dict(scale) if scale else None,
        )


@dataclass(frozen=True)
class Curation:
    method: CurationKind
    interval_seconds: Optional[int] = None
    weights: Optional[tuple[tuple[str, int], ...]] = None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"method": self.method}
        if self.method == "slideshow":
            data["intervalSeconds"] = self.interval_seconds
        if self.method == "mini-dashboard":
            data["weights"] = dict(self.weights or ())
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Curation":
        method = data.get("method")
        if method not in ("stack", "carousel", "slideshow", "mini-dashboard"):
            raise ValidationError("InvalidCuration", f"unknown curation method {method!r}")
        interval = None
        weights = None
        if method == "slideshow":
            interval = int(data.get("intervalSeconds", DEFAULT_SLIDESHOW_INTERVAL_S))
            if interval < 1:
                raise ValidationError("InvalidCuration", "slideshow interval must be >= 1s")
        if method == "mini-dashboard":
            raw = data.get("weights") or {}
            for value in raw.values():
                if value not in (1, 2, 3):
                    raise ValidationError("InvalidCuration", "weights must be 1, 2, or 3")
            weights = tuple(sorted((str(k), int(v)) for k, v in raw.items()))
        return cls(method=method, interval_seconds=interval, weights=weights)

    def validate_for(self, components: list[SnapshotComponent]) -> None:
        if self.method == "mini-dashboard":
            if len(components) < 2:
                raise ValidationError("CurationArityMismatch",
                                      "mini-dashboard curation needs >=2 components")
            covered = {k for k, _ in (self.weights or ())}
            missing = {c.id for c in components} - covered
            if missing:
                raise ValidationError("CurationArityMismatch",
                                      f"weights missing for components: {sorted(missing)}")


@dataclass(frozen=True)
class UpdatePolicy:
    mode: Literal["manual", "interval"]
    interval_days: Optional[int] = None
    consumer_refresh_allowed: bool = False

    def __post_init__(self) -> None:
        if self.mode not in ("manual", "interval"):
            raise ValidationError("InvalidPolicy", f"unknown update mode {self.mode!r}")
        if self.mode == "interval":
            if self.interval_days is None or self.interval_days < 1:
                raise ValidationError("InvalidPolicy", "update interval must be >= 1 day")

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode, "intervalDays": self.interval_days,
                "consumerRefreshAllowed": self.consumer_refresh_allowed}

    @classmethod
    def from_dict(cls, data: Optional[dict[str, Any]]) -> "UpdatePolicy":
        data = data or {"mode": "manual"}
        return cls(mode=data.get("mode", "manual"),
                   interval_days=data.get("intervalDays"),
                   consumer_refresh_allowed=data.get("consumerRefreshAllowed", False))


@dataclass(frozen=True)
class Status:
    """Freshness and completeness of one stored version at a point in time."""

    freshness: Literal["fresh", "stale"]
    freshness_date: Optional[date]
    completeness: Literal["complete", "incomplete"]
    note: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "freshness": self.freshness,
            "freshnessDate": self.freshness_date.isoformat() if self.freshness_date else None,
            "staleSince": (self.freshness_date.isoformat()
                           if self.freshness == "stale" and self.freshness_date else None),
            "completeness": self.completeness,
            "note": self.note,
        }


@dataclass(frozen=True)
class SnapshotVersion:
    snapshot_id: str
    version: int
    components: tuple[SnapshotComponent, ...]
    curation: Curation
    creator_id: str
    target_channel_id: str
    reshareable: bool
    policy: UpdatePolicy
    created_at: date
    freshness_date: Optional[date]
    completeness_note: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "snapshotId": self.snapshot_id,
            "version": self.version,
            "components": [c.to_dict() for c in self.components],
            "curation": self.curation.to_dict(),
            "creatorId": self.creator_id,
            "targetChannelId": self.target_channel_id,
            "reshareable": self.reshareable,
            "policy": self.policy.to_dict(),
            "createdAt": self.created_at.isoformat(),
            "freshnessDate": self.freshness_date.isoformat() if self.freshness_date else None,
            "completenessNote": self.completeness_note,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SnapshotVersion":
        return cls(
            snapshot_id=data["snapshotId"],
            version=data["version"],
            components=tuple(SnapshotComponent.from_dict(c) for c in data["components"]),
            curation=Curation.from_dict(data["curation"]),
            creator_id=data["creatorId"],
            target_channel_id=data["targetChannelId"],
            reshareable=data["reshareable"],
            policy=UpdatePolicy.from_dict(data["policy"]),
            created_at=parse_iso_date(data["createdAt"]),
            freshness_date=(parse_iso_date(data["freshnessDate"])
                            if data.get("freshnessDate") else None),
            completeness_note=data.get("completenessNote"),
        )


@dataclass
class Snapshot:
    """Aggregate root: an append-only list of versions plus head metadata."""

    id: str
    versions: list[SnapshotVersion] = dc_field(default_factory=list)
    last_update_at: Optional[date] = None

    @property
    def latest(self) -> SnapshotVersion:
        return self.versions[-1]

    def version(self, number: int) -> SnapshotVersion:
        for v in self.versions:
            if v.version == number:
                return v
        raise NotFoundError("UnknownSnapshot",
                            f"snapshot {self.id} has no version {number}",
                            snapshot=self.id, version=number)


def build_component(selection: Selection, kind: TemplateKind, params: TemplateParams,
                    datasets: dict[str, Dataset], *, component_id: str,
                    scale: Optional[ColorScale] = None,
                    widget: Optional[Widget] = None,
                    now: Optional[date] = None,
                    allow_empty: bool = False) -> SnapshotComponent:
    """Resolve a selection and instantiate its template (pure).

    Comparison templates resolve twice: time-over-time shifts the frame
    back by the comparison offset and pairs buckets positionally;
    trend-correlation resolves the second measure and joins on group keys.

    ``allow_empty`` is the update path: a window that resolved to zero rows
    (data lag) yields a component without chart or caption instead of an
    error, and the gap surfaces through the completeness status.
    """
    if kind not in TEMPLATE_KINDS:
        raise ValidationError("UnknownTemplateKind", f"unknown template kind {kind!r}")
    table = resolve_selection(selection, datasets, now)

    if kind == "time-over-time":
        if params.comparison_offset is None:
            raise ValidationError("MissingParam",
                                  "time-over-time requires parameter 'comparisonOffset'",
                                  param="comparisonOffset")
        if selection.time_frame is None:
            raise ValidationError("ShapeMismatch",
                                  "time-over-time requires a selection with a time frame")
        offset = params.comparison_offset
        prior_frame = replace(
            selection.time_frame,
            anchor=add_units(selection.time_frame.anchor, offset.unit, -offset.count),
            grid_seed=None,
        )
        prior = resolve_selection(replace(selection, time_frame=prior_frame), datasets, now)
        table = paired_by_index(table, prior)
    elif kind == "trend-correlation":
        if params.second_measure is None:
            raise ValidationError("MissingParam",
                                  "trend-correlation requires parameter 'secondMeasure'",
                                  param="secondMeasure")
        second = resolve_selection(replace(selection, measure=params.second_measure),
                                   datasets, now)
        table = paired_by_group(table, second, params.second_measure)

    spec: Optional[ChartSpec] = None
    caption: Optional[Caption] = None
    if table.is_empty and allow_empty:
        pass
    elif kind == "preserve-original":
        if widget is None:
            raise ValidationError("ShapeMismatch",
                                  "preserve-original needs the source widget")
        if table.is_empty:
            raise ValidationError("EmptyTable", "cannot preserve an empty resolution")
        spec = preserve_original(widget, table)
        if scale is not None and spec.encodings.get("color"):
            spec = apply_color_scale(spec, scale)
    else:
        spec, caption = instantiate(kind, table, params, scale)

    return SnapshotComponent(
        id=component_id,
        selection=selection,
        template_kind=kind,
        params=params,
        table=table,
        chart_spec=spec if params.include_chart else None,
        caption=caption if params.include_caption else None,
        color_scale=scale,
    )


def compute_status(version: SnapshotVersion, now: date) -> Status:
    """Freshness (stale at or after the freshness date) plus completeness.

    Completeness is incomplete when the creator declared a gap or when any
    component's resolved frame has buckets with zero source rows; the note
    is generated deterministically in the latter case.
    """
    if version.freshness_date is not None and now >= version.freshness_date:
        freshness: Literal["fresh", "stale"] = "stale"
    else:
        freshness = "fresh"

    note = version.completeness_note
    if note is None:
        gap_parts: list[str] = []
        for component in version.components:
            tf = component.time_frame
            if tf is None:
                continue
            gaps = detect_gaps(component.table, tf)
            if gaps:
                labels = ", ".join(b.label for b in gaps)
                gap_parts.append(f"{component.id}: no data for {labels}")
        if gap_parts:
            note = "; ".join(gap_parts)
    completeness: Literal["complete", "incomplete"] = "incomplete" if note else "complete"
    return Status(freshness=freshness,
                  freshness_date=version.freshness_date,
                  completeness=completeness,
                  note=note)


class SnapshotStore:
    """Owns draft components and snapshot version histories.

    Stored versions are frozen dataclasses and never mutated; every update
    appends. The store reads datasets through the registry handed in by the
    hub so updates can re-resolve selections.
    """

    def __init__(self, datasets: dict[str, Dataset], dashboards: dict[str, Dashboard]) -> None:
        self.datasets = datasets
        self.dashboards = dashboards
        self.drafts: dict[str, SnapshotComponent] = {}
        self.snapshots: dict[str, Snapshot] = {}

    # -- drafts ---------------------------------------------------------

    def create_component(self, selection: Selection, kind: TemplateKind,
                         params: TemplateParams, *, component_id: str,
                         scale: Optional[ColorScale] = None,
                         widget: Optional[Widget] = None,
                         now: Optional[date] = None) -> SnapshotComponent:
        component = build_component(selection, kind, params, self.datasets,
                                    component_id=component_id, scale=scale,
                                    widget=widget, now=now)
        self.drafts[component_id] = component
        return component

    def draft(self, component_id: str) -> SnapshotComponent:
        if component_id not in self.drafts:
            if any(component_id == c.id
                   for snap in self.snapshots.values()
                   for v in snap.versions for c in v.components):
                raise Conflict("VersionImmutable",
                               f"component {component_id} belongs to a stored version",
                               component=component_id)
            raise NotFoundError("UnknownComponent", f"no draft component {component_id!r}",
                                component=component_id)
        return self.drafts[component_id]

    def annotate(self, component_id: str, annotation: Annotation,
                 snapshot_id: Optional[str] = None) -> SnapshotComponent:
        """Append an annotation to a draft; stored versions refuse."""
        if snapshot_id is not None and snapshot_id in self.snapshots:
            raise Conflict("VersionImmutable",
                           f"snapshot {snapshot_id} versions are immutable; "
                           "annotate a draft and compose a new snapshot",
                           snapshot=snapshot_id)
        component = self.draft(component_id)
        updated = replace(component, annotations=component.annotations + (annotation,))
        self.drafts[component_id] = updated
        return updated

    def add_control(self, component_id: str, control: InteractivityControl) -> SnapshotComponent:
        component = self.draft(component_id)
        if control.field not in component.selection.dimensions:
            raise ValidationError("InvalidControl",
                                  f"control field {control.field!r} is not a selection dimension")
        ds = self.datasets[component.selection.dataset_id]
        domain = {str(row[control.field]) for row in ds.rows}
        outside = set(control.allowed_values) - domain
        if outside:
            raise ValidationError("InvalidControl",
                                  f"allowed values outside the data domain: {sorted(outside)}")
        updated = replace(component, controls=component.controls + (control,))
        self.drafts[component_id] = updated
        return updated

    # -- composition ------------------------------------------------------

    def compose(self, component_ids: list[str], curation: Curation, channel_id: str,
                policy: UpdatePolicy, reshareable: bool, creator_id: str, now: date,
                *, snapshot_id: str, completeness_note: Optional[str] = None) -> SnapshotVersion:
        if not component_ids:
            raise ValidationError("CurationArityMismatch", "a snapshot needs >=1 component")
        components = [self.draft(cid) for cid in component_ids]
        curation.validate_for(components)
        version = SnapshotVersion(
            snapshot_id=snapshot_id,
            version=1,
            components=tuple(components),
            curation=curation,
            creator_id=creator_id,
            target_channel_id=channel_id,
            reshareable=reshareable,
            policy=policy,
            created_at=now,
            freshness_date=infer_freshness(c.time_frame for c in components),
            completeness_note=completeness_note,
        )
        self.snapshots[snapshot_id] = Snapshot(id=snapshot_id, versions=[version],
                                               last_update_at=now)
        return version

    def get(self, snapshot_id: str) -> Snapshot:
        snap = self.snapshots.get(snapshot_id)
        if snap is None:
            raise NotFoundError("UnknownSnapshot", f"no snapshot {snapshot_id!r}",
                                snapshot=snapshot_id)
        return snap

    def version_history(self, snapshot_id: str) -> list[SnapshotVersion]:
        return list(self.get(snapshot_id).versions)

    # -- updates --------------------------------------------------------

    def update(self, snapshot_id: str, now: date, trigger: UpdateTrigger,
               actor_id: Optional[str] = None) -> SnapshotVersion:
        """Append the next version with advanced frames and fresh data.

        Annotations are dropped (they were written against the old data);
        template captions regenerate; controls carry over. Scheduled and
        consumer triggers require at least one frame to actually advance.
        """
        snap = self.get(snapshot_id)
        head = snap.latest
        if trigger == "consumer" and not head.policy.consumer_refresh_allowed:
            raise Forbidden("RefreshNotPermitted",
                            "consumers may not refresh this snapshot",
                            snapshot=snapshot_id)

        new_components: list[SnapshotComponent] = []
        advanced = False
        for component in head.components:
            tf = component.time_frame
            selection = component.selection
            if tf is not None:
                new_tf = advance(tf, now)
                if new_tf is not tf:
                    advanced = True
                selection = replace(selection, time_frame=new_tf)
            widget = None
            if component.template_kind == "preserve-original":
                board = self.dashboards.get(selection.dashboard_id)
                if board is not None:
                    widget = board.widget(selection.widget_ids[0])
            rebuilt = build_component(
                selection, component.template_kind, component.params, self.datasets,
                component_id=component.id, scale=component.color_scale, now=now,
                widget=widget, allow_empty=True,
            )
            new_components.append(replace(rebuilt, controls=component.controls))

        if trigger != "manual" and not advanced:
            raise Conflict("NothingToUpdate",
                           "no component time frame has a newly completed period",
                           snapshot=snapshot_id)

        version = SnapshotVersion(
            snapshot_id=snapshot_id,
            version=head.version + 1,
            components=tuple(new_components),
            curation=head.curation,
            creator_id=head.creator_id,
            target_channel_id=head.target_channel_id,
            reshareable=head.reshareable,
            policy=head.policy,
            created_at=now,
            freshness_date=infer_freshness(c.time_frame for c in new_components),
            completeness_note=None,
        )
        snap.versions.append(version)
        snap.last_update_at = now
        return version

    def due_updates(self, now: date) -> list[str]:
        """Interval-mode snapshots whose last update is at least one interval old."""
        due = []
        for snap in sorted(self.snapshots.values(), key=lambda s: s.id):
            policy = snap.latest.policy
            if policy.mode != "interval":
                continue
            last = snap.last_update_at or snap.latest.created_at
            if last + timedelta(days=policy.interval_days) <= now:
                due.append(snap.id)
        return due

    # -- state ----------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "drafts": {cid: c.to_dict() for cid, c in sorted(self.drafts.items())},
            "snapshots": {
                sid: {
                    "versions": [v.to_dict() for v in snap.versions],
                    "lastUpdateAt": snap.last_update_at.isoformat()
                    if snap.last_update_at else None,
                }
                for sid, snap in sorted(self.snapshots.items())
            },
        }

    def load_dict(self, data: dict[str, Any]) -> None:
        self.drafts = {cid: SnapshotComponent.from_dict(c)
                       for cid, c in data.get("drafts", {}).items()}
        self.snapshots = {}
        for sid, raw in data.get("snapshots", {}).items():
            versions = [SnapshotVersion.from_dict(v) for v in raw["versions"]]
            self.snapshots[sid] = Snapshot(
                id=sid, versions=versions,
                last_update_at=(parse_iso_date(raw["lastUpdateAt"])
                                if raw.get("lastUpdateAt") else None),
            )
