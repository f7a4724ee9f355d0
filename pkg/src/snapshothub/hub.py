"""Aggregate root: command execution, journaling, recovery, scheduling.

Every state-changing operation is a command: validated, applied to the
in-memory state, then appended to the journal as one canonical-JSON line.
IDs come from per-prefix counters and timestamps ride inside the command
body, so replaying the journal from an empty hub (optionally on top of a
checkpoint) rebuilds a byte-identical state. All writes funnel through one
lock; reads see immutable value objects.

The hub is the single validator: the HTTP service and the CLI both hand it
the same JSON-shaped payloads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Any, Callable, Optional

from .canonical import canonical_hash, parse_iso_date
from .clock import DEFAULT_VIRTUAL_START, Clock
from .collab import Channel, Platform, User
from .datacore import (
    ColorScale,
    Dashboard,
    Dataset,
    Selection,
    extract_selection,
    load_dataset,
    resolve_selection,
)
from .errors import Conflict, NotFoundError, ValidationError
from .journal import Journal
from .snapshots import (
    Annotation,
    Curation,
    InteractivityControl,
    SnapshotStore,
    UpdatePolicy,
    compute_status,
)
from .telemetry import TelemetryLog
from .telemetry import home_feed as build_home_feed
from .telemetry import propagation as build_propagation
from .templates import TemplateParams


@dataclass
class HubConfig:
    data_dir: Optional[Path] = None
    clock_mode: str = "virtual"
    clock_start: date = DEFAULT_VIRTUAL_START
    viewer_names_visible: bool = False

    def __post_init__(self) -> None:
        if self.clock_mode not in ("virtual", "wall"):
            raise ValidationError("ConfigInvalid",
                                  f"unknown clock mode {self.clock_mode!r}")
        if self.data_dir is not None:
            self.data_dir = Path(self.data_dir)


class Hub:
    """Owns all state; commands go through :meth:`execute` and the journal."""

    def __init__(self, config: Optional[HubConfig] = None) -> None:
        self.config = config or HubConfig()
        self._lock = threading.RLock()
        self._replaying = False
        self.seq = 0
        self.journal: Optional[Journal] = None
        self._reset_state()
        if self.config.data_dir is not None:
            self.journal = Journal(self.config.data_dir)
            self._recover()

    def _reset_state(self) -> None:
        self.counters: dict[str, int] = {}
        self.clock = Clock(mode=self.config.clock_mode, current=self.config.clock_start)
        self.datasets: dict[str, Dataset] = {}
        self.dashboards: dict[str, Dashboard] = {}
        self.store = SnapshotStore(self.datasets, self.dashboards)
        self.telemetry = TelemetryLog()
        self.platform = Platform(self.store, self.telemetry, self.datasets)

    # -- command plumbing ---------------------------------------------------

    def _next_id(self, prefix: str) -> str:
        self.counters[prefix] = self.counters.get(prefix, 0) + 1
        return f"{prefix}-{self.counters[prefix]}"

    def execute(self, kind: str, body: dict[str, Any]) -> Any:
        """Validate and apply a command, then journal it."""
        handler = self._HANDLERS.get(kind)
        if handler is None:
            raise ValidationError("UnknownCommand", f"unknown command {kind!r}")
        with self._lock:
            if not self._replaying and "at" not in body:
                body = dict(body, at=self.clock.today().isoformat())
            result = handler(self, body)
            if not self._replaying and self.journal is not None:
                self.journal.append(self.seq + 1, kind, body)
            self.seq += 1
            return result

    def _recover(self) -> None:
        assert self.journal is not None
        checkpoint = self.journal.read_checkpoint()
        start_seq = 0
        if checkpoint is not None:
            self.load_state(checkpoint["state"])
            self.seq = checkpoint["seq"]
            start_seq = checkpoint["seq"]
        self._replaying = True
        try:
            for record in self.journal.records(after_seq=start_seq):
                self.execute(record["kind"], record["body"])
        finally:
            self._replaying = False
        if self.seq == 0:
            # Brand-new journal: seed it so replay-from-empty reproduces the
            # clock without depending on construction-time config.
            self.execute("init_clock", {"mode": self.clock.mode,
                                        "now": self.clock.current.isoformat()})

    def checkpoint(self) -> dict[str, Any]:
        """Materialize current state so replay can start from here."""
        with self._lock:
            state = self.state_dict()
            if self.journal is not None:
                return self.journal.write_checkpoint(self.seq, state)
            return {"seq": self.seq, "state": state}

    def close(self) -> None:
        if self.journal is not None:
            self.journal.close()

    # -- state serialization -------------------------------------------------

    def state_dict(self) -> dict[str, Any]:
        with self._lock:
            return {
                "counters": dict(sorted(self.counters.items())),
                "clock": self.clock.to_dict(),
                "datasets": {did: ds.to_dict() for did, ds in sorted(self.datasets.items())},
                "dashboards": {bid: b.to_dict() for bid, b in sorted(self.dashboards.items())},
                "store": self.store.to_dict(),
                "platform": self.platform.to_dict(),
                "events": self.telemetry.to_dict(),
            }

    def load_state(self, state: dict[str, Any]) -> None:
        with self._lock:
            self._reset_state()
            self.counters = dict(state.get("counters", {}))
            self.clock = Clock.from_dict(state["clock"])
            for did, raw in state.get("datasets", {}).items():
                self.datasets[did] = Dataset.from_dict(raw)
            for bid, raw in state.get("dashboards", {}).items():
                self.dashboards[bid] = Dashboard.from_dict(raw, self.datasets)
            self.store.load_dict(state.get("store", {}))
            self.platform.load_dict(state.get("platform", {}))
            self.telemetry.load_dict(state.get("events", []))

    def state_hash(self) -> str:
        return canonical_hash(self.state_dict())

    # -- time ------------------------------------------------------------

    def now(self) -> date:
        return self.clock.today()

    # -- command handlers ---------------------------------------------------

    def _cmd_init_clock(self, body: dict[str, Any]) -> dict[str, Any]:
        self.clock = Clock(mode=body["mode"], current=parse_iso_date(body["now"]))
        return {"mode": self.clock.mode, "now": self.clock.current.isoformat()}

    def _cmd_ingest_dataset(self, body: dict[str, Any]) -> dict[str, Any]:
        dataset_id = self._next_id("ds")
        ds = Dataset.from_dict({
            "id": dataset_id,
            "name": body.get("name", dataset_id),
            "schema": body["schema"],
            "rows": body["rows"],
        })
        self.datasets[dataset_id] = ds
        return {"datasetId": dataset_id, "name": ds.name,
                "schema": [f.to_dict() for f in ds.schema], "rowCount": len(ds.rows)}

    def _cmd_create_dashboard(self, body: dict[str, Any]) -> dict[str, Any]:
        doc = body["dashboard"]
        if "id" not in doc:
            doc = dict(doc, id=self._next_id("db"))
        board = Dashboard.from_dict(doc, self.datasets)
        if board.id in self.dashboards:
            raise Conflict("DuplicateId", f"dashboard {board.id!r} already exists")
        self.dashboards[board.id] = board
        return {"dashboardId": board.id}

    def _cmd_create_user(self, body: dict[str, Any]) -> dict[str, Any]:
        doc = body["user"]
        for grant in doc.get("datasetGrants", []):
            if grant not in self.datasets:
                raise NotFoundError("UnknownDataset",
                                    f"grant references unknown dataset {grant!r}",
                                    dataset=grant)
        user = self.platform.users.get(doc["id"])
        if user is None:
            self.platform.users[doc["id"]] = User.from_dict(doc)
        else:
            user.dataset_grants |= set(doc.get("datasetGrants", []))
        return {"userId": doc["id"]}

    def _cmd_create_channel(self, body: dict[str, Any]) -> dict[str, Any]:
        doc = body["channel"]
        if "id" not in doc:
            doc = dict(doc, id=self._next_id("ch"))
        channel = Channel.from_dict(doc)
        if channel.id in self.platform.channels:
            raise Conflict("DuplicateId", f"channel {channel.id!r} already exists")
        for member in channel.members:
            self.platform.user(member)
        self.platform.channels[channel.id] = channel
        return {"channelId": channel.id}

    def _cmd_add_member(self, body: dict[str, Any]) -> dict[str, Any]:
        channel = self.platform.channel(body["channelId"])
        self.platform.user(body["userId"])
        channel.members.add(body["userId"])
        return {"channelId": channel.id, "members": sorted(channel.members)}

    def _selection_from_payload(self, body: dict[str, Any]) -> Selection:
        if "selection" in body and body["selection"] is not None:
            selection = Selection.from_dict(body["selection"])
            selection.validate(self.datasets)
            return selection
        if "widgetId" in body:
            dashboard = self._dashboard(body["dashboardId"])
            return extract_selection(dashboard, body["widgetId"],
                                     body.get("overrides"), datasets=self.datasets)
        raise ValidationError("InvalidSelection",
                              "payload needs either 'selection' or 'dashboardId'+'widgetId'")

    def _dashboard(self, dashboard_id: str) -> Dashboard:
        board = self.dashboards.get(dashboard_id)
        if board is None:
            raise NotFoundError("UnknownDashboard", f"no dashboard {dashboard_id!r}",
                                dashboard=dashboard_id)
        return board

    def _scale_from_payload(self, body: dict[str, Any],
                            selection: Selection) -> Optional[ColorScale]:
        name = body.get("colorScale")
        if name is None:
            return None
        if isinstance(name, dict):
            return ColorScale.from_dict(name)
        return self._dashboard(selection.dashboard_id).scale(name)

    def _cmd_create_component(self, body: dict[str, Any]) -> dict[str, Any]:
        selection = self._selection_from_payload(body)
        kind = body.get("templateKind", "preserve-original")
        params = TemplateParams.from_dict(body.get("params"))
        scale = self._scale_from_payload(body, selection)
        widget = None
        if kind == "preserve-original":
            if "widgetId" not in body:
                raise ValidationError("ShapeMismatch",
                                      "preserve-original needs 'dashboardId'+'widgetId'")
            widget = self._dashboard(body["dashboardId"]).widget(body["widgetId"])
            if scale is None and widget.color_scale:
                scale = self._dashboard(body["dashboardId"]).scale(widget.color_scale)
        component_id = self._next_id("comp")
        component = self.store.create_component(
            selection, kind, params, component_id=component_id, scale=scale,
            widget=widget, now=parse_iso_date(body["at"]),
        )
        for raw in body.get("annotations", []):
            component = self.store.annotate(component_id, Annotation.from_dict(raw))
        for raw in body.get("controls", []):
            component = self.store.add_control(component_id,
                                               InteractivityControl.from_dict(raw))
        return component.to_dict()

    def _cmd_annotate_component(self, body: dict[str, Any]) -> dict[str, Any]:
        component = self.store.annotate(body["componentId"],
                                        Annotation.from_dict(body["annotation"]),
                                        snapshot_id=body.get("snapshotId"))
        return component.to_dict()

    def _cmd_add_control(self, body: dict[str, Any]) -> dict[str, Any]:
        component = self.store.add_control(body["componentId"],
                                           InteractivityControl.from_dict(body["control"]))
        return component.to_dict()

    def _cmd_compose_snapshot(self, body: dict[str, Any]) -> dict[str, Any]:
        channel_id = body["targetChannelId"]
        self.platform.channel(channel_id)
        creator = body["creatorId"]
        self.platform.user(creator)
        curation = Curation.from_dict(body.get("curation") or {"method": "stack"})
        policy = UpdatePolicy.from_dict(body.get("policy"))
        snapshot_id = self._next_id("snap")
        version = self.store.compose(
            list(body["componentIds"]), curation, channel_id, policy,
            bool(body.get("reshareable", True)), creator,
            parse_iso_date(body["at"]), snapshot_id=snapshot_id,
            completeness_note=body.get("completenessNote"),
        )
        return {"snapshotId": snapshot_id, "version": version.to_dict()}

    def _cmd_update_snapshot(self, body: dict[str, Any]) -> dict[str, Any]:
        trigger = body.get("trigger", "manual")
        if trigger not in ("scheduled", "manual", "consumer"):
            raise ValidationError("InvalidTrigger", f"unknown trigger {trigger!r}")
        at = parse_iso_date(body["at"])
        version = self.store.update(body["snapshotId"], at, trigger,
                                    actor_id=body.get("actorId"))
        self.telemetry.record(
            "update", snapshot_id=body["snapshotId"], version=version.version,
            actor_id=body.get("actorId"), at=at,
            payload={"trigger": trigger, "fromVersion": version.version - 1,
                     "toVersion": version.version},
        )
        return {"snapshotId": body["snapshotId"], "version": version.to_dict()}

    def _cmd_post_snapshot(self, body: dict[str, Any]) -> dict[str, Any]:
        posting = self.platform.post(
            body["snapshotId"], body.get("version"), body["channelId"],
            body["authorId"], parse_iso_date(body["at"]),
            posting_id=self._next_id("post"),
        )
        return posting.to_dict()

    def _cmd_reshare_posting(self, body: dict[str, Any]) -> dict[str, Any]:
        posting = self.platform.reshare(
            body["postingId"], body["targetChannelId"], body["actorId"],
            parse_iso_date(body["at"]), new_posting_id=self._next_id("post"),
        )
        return posting.to_dict()

    def _cmd_view_posting(self, body: dict[str, Any]) -> dict[str, Any]:
        return self.platform.view(body["postingId"], body["viewerId"],
                                  body.get("size", "wide"), parse_iso_date(body["at"]))

    def _cmd_interact(self, body: dict[str, Any]) -> dict[str, Any]:
        return self.platform.interact(body["postingId"], body["viewerId"],
                                      body["controlId"], body["value"],
                                      parse_iso_date(body["at"]))

    def _cmd_react(self, body: dict[str, Any]) -> dict[str, Any]:
        reaction = self.platform.react(body["targetId"], body["userId"],
                                       body["emoji"], parse_iso_date(body["at"]))
        return reaction.to_dict()

    def _cmd_comment(self, body: dict[str, Any]) -> dict[str, Any]:
        message = self.platform.comment(
            body["channelId"], body["userId"], body["text"],
            parse_iso_date(body["at"]), message_id=self._next_id("msg"),
            thread_parent=body.get("threadParent"),
        )
        return message.to_dict()

    def _cmd_request_access(self, body: dict[str, Any]) -> dict[str, Any]:
        request = self.platform.request_access(body["postingId"], body["requesterId"],
                                               request_id=self._next_id("req"))
        return request.to_dict()

    def _cmd_decide_access(self, body: dict[str, Any]) -> dict[str, Any]:
        request = self.platform.decide_access(body["requestId"], body["deciderId"],
                                              body["decision"])
        return request.to_dict()

    def _cmd_tick(self, body: dict[str, Any]) -> dict[str, Any]:
        """Advance the virtual clock day by day, applying due scheduled updates."""
        target = parse_iso_date(body["to"], what="tick target")
        if self.clock.mode != "virtual":
            raise ValidationError("WallClockMode", "tick requires a virtual clock")
        if target < self.clock.current:
            raise ValidationError("ClockRegression",
                                  f"cannot tick backwards from {self.clock.current} to {target}")
        performed: list[dict[str, Any]] = []
        day = self.clock.current
        while day < target:
            day = day + timedelta(days=1)
            self.clock.tick_to(day)
            for snapshot_id in self.store.due_updates(day):
                try:
                    version = self.store.update(snapshot_id, day, "scheduled")
                except Conflict:
                    continue
                self.telemetry.record(
                    "update", snapshot_id=snapshot_id, version=version.version,
                    actor_id=None, at=day,
                    payload={"trigger": "scheduled",
                             "fromVersion": version.version - 1,
                             "toVersion": version.version},
                )
                performed.append({"snapshotId": snapshot_id,
                                  "version": version.version,
                                  "at": day.isoformat()})
        return {"now": self.clock.current.isoformat(), "performed": performed}

    _HANDLERS: dict[str, Callable[["Hub", dict[str, Any]], Any]] = {}

    # -- public command API ----------------------------------------------

    def ingest_dataset(self, source: bytes | str, fmt: str,
                       schema_hint: Optional[dict[str, str]] = None,
                       name: str = "dataset") -> dict[str, Any]:
        """Parse outside the command so the journal holds typed rows, not bytes."""
        parsed = load_dataset(source, fmt, schema_hint, dataset_id="pending", name=name)
        body = parsed.to_dict()
        return self.execute("ingest_dataset", {"name": body["name"],
                                               "schema": body["schema"],
                                               "rows": body["rows"]})

    def create_dashboard(self, doc: dict[str, Any]) -> dict[str, Any]:
        return self.execute("create_dashboard", {"dashboard": doc})

    def create_user(self, doc: dict[str, Any]) -> dict[str, Any]:
        return self.execute("create_user", {"user": doc})

    def create_channel(self, doc: dict[str, Any]) -> dict[str, Any]:
        return self.execute("create_channel", {"channel": doc})

    def add_member(self, channel_id: str, user_id: str) -> dict[str, Any]:
        return self.execute("add_member", {"channelId": channel_id, "userId": user_id})

    def create_component(self, payload: dict[str, Any]) -> dict[str, Any]:
        return self.execute("create_component", payload)

    def annotate_component(self, component_id: str, annotation: dict[str, Any],
                           snapshot_id: Optional[str] = None) -> dict[str, Any]:
        body = {"componentId": component_id, "annotation": annotation}
        if snapshot_id is not None:
            body["snapshotId"] = snapshot_id
        return self.execute("annotate_component", body)

    def add_control(self, component_id: str, control: dict[str, Any]) -> dict[str, Any]:
        return self.execute("add_control", {"componentId": component_id, "control": control})

    def compose_snapshot(self, payload: dict[str, Any]) -> dict[str, Any]:
        return self.execute("compose_snapshot", payload)

    def update_snapshot(self, snapshot_id: str, trigger: str = "manual",
                        actor_id: Optional[str] = None) -> dict[str, Any]:
        body: dict[str, Any] = {"snapshotId": snapshot_id, "trigger": trigger}
        if actor_id is not None:
            body["actorId"] = actor_id
        return self.execute("update_snapshot", body)

    def post_snapshot(self, snapshot_id: str, channel_id: str, author_id: str,
                      version: Optional[int] = None) -> dict[str, Any]:
        body: dict[str, Any] = {"snapshotId": snapshot_id, "channelId": channel_id,
                                "authorId": author_id}
        if version is not None:
            body["version"] = version
        return self.execute("post_snapshot", body)

    def reshare_posting(self, posting_id: str, target_channel_id: str,
                        actor_id: str) -> dict[str, Any]:
        return self.execute("reshare_posting", {"postingId": posting_id,
                                                "targetChannelId": target_channel_id,
                                                "actorId": actor_id})

    def view_posting(self, posting_id: str, viewer_id: str,
                     size: str = "wide") -> dict[str, Any]:
        return self.execute("view_posting", {"postingId": posting_id,
                                             "viewerId": viewer_id, "size": size})

    def interact(self, posting_id: str, viewer_id: str, control_id: str,
                 value: str) -> dict[str, Any]:
        return self.execute("interact", {"postingId": posting_id, "viewerId": viewer_id,
                                         "controlId": control_id, "value": value})

    def react(self, target_id: str, user_id: str, emoji: str) -> dict[str, Any]:
        return self.execute("react", {"targetId": target_id, "userId": user_id,
                                      "emoji": emoji})

    def comment(self, channel_id: str, user_id: str, text: str,
                thread_parent: Optional[str] = None) -> dict[str, Any]:
        body: dict[str, Any] = {"channelId": channel_id, "userId": user_id, "text": text}
        if thread_parent is not None:
            body["threadParent"] = thread_parent
        return self.execute("comment", body)

    def request_access(self, posting_id: str, requester_id: str) -> dict[str, Any]:
        return self.execute("request_access", {"postingId": posting_id,
                                               "requesterId": requester_id})

    def decide_access(self, request_id: str, decider_id: str,
                      decision: str) -> dict[str, Any]:
        return self.execute("decide_access", {"requestId": request_id,
                                              "deciderId": decider_id,
                                              "decision": decision})

    def tick(self, to: str | date) -> dict[str, Any]:
        to_iso = to.isoformat() if isinstance(to, date) else to
        return self.execute("tick", {"to": to_iso})

    # -- read-only API ----------------------------------------------------

    def resolve_payload(self, payload: dict[str, Any]) -> dict[str, Any]:
        with self._lock:
            selection = self._selection_from_payload(payload)
            table = resolve_selection(selection, self.datasets, self.now())
            return {"selection": selection.to_dict(), "table": table.to_dict()}

    def get_dashboard(self, dashboard_id: str) -> dict[str, Any]:
        with self._lock:
            return self._dashboard(dashboard_id).to_dict()

    def list_dashboards(self) -> list[dict[str, Any]]:
        with self._lock:
            return [{"id": b.id, "title": b.title}
                    for b in sorted(self.dashboards.values(), key=lambda b: b.id)]

    def list_datasets(self) -> list[dict[str, Any]]:
        with self._lock:
            return [{"id": ds.id, "name": ds.name,
                     "schema": [f.to_dict() for f in ds.schema],
                     "rowCount": len(ds.rows)}
                    for ds in sorted(self.datasets.values(), key=lambda d: d.id)]

    def list_channels(self) -> list[dict[str, Any]]:
        with self._lock:
            return [c.to_dict()
                    for c in sorted(self.platform.channels.values(), key=lambda c: c.id)]

    def list_users(self) -> list[dict[str, Any]]:
        with self._lock:
            return [u.to_dict()
                    for u in sorted(self.platform.users.values(), key=lambda u: u.id)]

    def version_history(self, snapshot_id: str) -> list[dict[str, Any]]:
        with self._lock:
            now = self.now()
            return [{"version": v.to_dict(), "status": compute_status(v, now).to_dict()}
                    for v in self.store.version_history(snapshot_id)]

    def snapshot_status(self, snapshot_id: str) -> dict[str, Any]:
        with self._lock:
            head = self.store.get(snapshot_id).latest
            return {"snapshotId": snapshot_id, "version": head.version,
                    "status": compute_status(head, self.now()).to_dict()}

    def version_hash(self, snapshot_id: str, version: Optional[int] = None) -> dict[str, Any]:
        """Canonical hash of one stored version (the latest by default)."""
        with self._lock:
            snap = self.store.get(snapshot_id)
            record = snap.version(version) if version is not None else snap.latest
            return {"snapshotId": snapshot_id, "version": record.version,
                    "hash": canonical_hash(record.to_dict())}

    def telemetry_summary(self, snapshot_id: str) -> dict[str, Any]:
        with self._lock:
            self.store.get(snapshot_id)
            summary = self.telemetry.summarize(
                snapshot_id, include_names=self.config.viewer_names_visible)
            return summary.to_dict()

    def propagation_graph(self, snapshot_id: str) -> dict[str, Any]:
        with self._lock:
            self.store.get(snapshot_id)
            graph = build_propagation(snapshot_id, list(self.platform.postings.values()))
            return graph.to_dict()

    def home_feed(self, creator_id: str) -> list[dict[str, Any]]:
        with self._lock:
            entries = build_home_feed(
                creator_id, self.now(), snapshot_store=self.store,
                telemetry=self.telemetry, compute_status=compute_status,
                include_names=self.config.viewer_names_visible,
            )
            return [e.to_dict() for e in entries]

    def channel_feed(self, channel_id: str) -> dict[str, Any]:
        with self._lock:
            return self.platform.channel_feed(channel_id)

    def get_posting(self, posting_id: str) -> dict[str, Any]:
        with self._lock:
            return self.platform.posting(posting_id).to_dict()

    def get_component(self, component_id: str) -> dict[str, Any]:
        with self._lock:
            return self.store.draft(component_id).to_dict()


Hub._HANDLERS = {
    "init_clock": Hub._cmd_init_clock,
    "ingest_dataset": Hub._cmd_ingest_dataset,
    "create_dashboard": Hub._cmd_create_dashboard,
    "create_user": Hub._cmd_create_user,
    "create_channel": Hub._cmd_create_channel,
    "add_member": Hub._cmd_add_member,
    "create_component": Hub._cmd_create_component,
    "annotate_component": Hub._cmd_annotate_component,
    "add_control": Hub._cmd_add_control,
    "compose_snapshot": Hub._cmd_compose_snapshot,
    "update_snapshot": Hub._cmd_update_snapshot,
    "post_snapshot": Hub._cmd_post_snapshot,
    "reshare_posting": Hub._cmd_reshare_posting,
    "view_posting": Hub._cmd_view_posting,
    "interact": Hub._cmd_interact,
    "react": Hub._cmd_react,
    "comment": Hub._cmd_comment,
    "request_access": Hub._cmd_request_access,
    "decide_access": Hub._cmd_decide_access,
    "tick": Hub._cmd_tick,
}
