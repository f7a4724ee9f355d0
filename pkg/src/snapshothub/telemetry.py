"""Append-only engagement log, summaries, propagation graphs, home feed.

Every view, interaction, reshare, reaction, comment, and update lands here
as an event with a strictly increasing id. Events classify as active only
when a consumer operates a control the creator flagged as a call to
action; everything else is passive. Summaries and graphs are pure folds
over the event list, so replaying the journal reproduces them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from datetime import date
from typing import Any, Callable, Literal, Optional

from .canonical import parse_iso_date
from .errors import NotFoundError

# "post" records the original share itself; it feeds the raw event log but
# no summary counter (propagation is derived from postings, views from views).
EventKind = Literal["view", "obfuscated-view", "interaction", "reshare",
                    "reaction", "comment", "update", "post"]

EVENT_KINDS: tuple[EventKind, ...] = ("view", "obfuscated-view", "interaction",
                                      "reshare", "reaction", "comment", "update", "post")


@dataclass(frozen=True)
class TelemetryEvent:
    id: int
    kind: EventKind
    klass: Literal["active", "passive"]
    actor_id: Optional[str]
    snapshot_id: str
    version: int
    at: date
    posting_id: Optional[str] = None
    channel_id: Optional[str] = None
    payload: dict[str, Any] = dc_field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind,
            "class": self.klass,
            "actorId": self.actor_id,
            "snapshotId": self.snapshot_id,
            "version": self.version,
            "postingId": self.posting_id,
            "channelId": self.channel_id,
            "at": self.at.isoformat(),
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TelemetryEvent":
        return cls(
            id=data["id"],
            kind=data["kind"],
            klass=data["class"],
            actor_id=data.get("actorId"),
            snapshot_id=data["snapshotId"],
            version=data["version"],
            posting_id=data.get("postingId"),
            channel_id=data.get("channelId"),
            at=parse_iso_date(data["at"]),
            payload=data.get("payload", {}),
        )


@dataclass(frozen=True)
class TelemetrySummary:
    views: int
    unique_viewers: int
    obfuscated_views: int
    reshares: int
    reactions: dict[str, int]
    comments: int
    interactions: int
    active_count: int
    per_channel: dict[str, int]
    viewer_names: Optional[list[str]] = None

    def to_dict(self) -> dict[str, Any]:
        data = {
            "views": self.views,
            "uniqueViewers": self.unique_viewers,
            "obfuscatedViews": self.obfuscated_views,
            "reshares": self.reshares,
            "reactions": self.reactions,
            "comments": self.comments,
            "interactions": self.interactions,
            "activeCount": self.active_count,
            "perChannel": self.per_channel,
        }
        if self.viewer_names is not None:
            data["viewerNames"] = self.viewer_names
        return data


@dataclass(frozen=True)
class PropagationGraph:
    """Reshare lineage of one snapshot: a forest rooted at original postings."""

    nodes: list[dict[str, Any]]
    edges: list[dict[str, str]]
    roots: list[str]

    def to_dict(self) -> dict[str, Any]:
        return {"nodes": self.nodes, "edges": self.edges, "roots": self.roots}


@dataclass(frozen=True)
class HomeFeedEntry:
    snapshot_id: str
    latest_version: int
    status: dict[str, Any]
    summary: TelemetrySummary
    stale_and_due: bool
    latest_activity: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "snapshotId": self.snapshot_id,
            "latestVersion": self.latest_version,
            "status": self.status,
            "summary": self.summary.to_dict(),
            "staleAndDue": self.stale_and_due,
            "latestActivity": self.latest_activity,
        }


class TelemetryLog:
    """Ordered event store. IDs are assigned on append, starting at 1."""

    def __init__(self) -> None:
        self.events: list[TelemetryEvent] = []

    def record(self, kind: EventKind, *, snapshot_id: str, version: int, at: date,
               actor_id: Optional[str] = None, posting_id: Optional[str] = None,
               channel_id: Optional[str] = None, active: bool = False,
               payload: Optional[dict[str, Any]] = None,
               snapshot_exists: Optional[Callable[[str], bool]] = None,
               posting_exists: Optional[Callable[[str], bool]] = None) -> int:
        if snapshot_exists is not None and not snapshot_exists(snapshot_id):
            raise NotFoundError("UnknownReference",
                                f"event references unknown snapshot {snapshot_id!r}",
                                snapshot=snapshot_id)
        if posting_id is not None and posting_exists is not None and not posting_exists(posting_id):
            raise NotFoundError("UnknownReference",
                                f"event references unknown posting {posting_id!r}",
                                posting=posting_id)
        if active and kind != "interaction":
            raise ValueError("only interaction events can be active")
        event = TelemetryEvent(
            id=len(self.events) + 1,
            kind=kind,
            klass="active" if active else "passive",
            actor_id=actor_id,
            snapshot_id=snapshot_id,
            version=version,
            posting_id=posting_id,
            channel_id=channel_id,
            at=at,
            payload=payload or {},
        )
        self.events.append(event)
        return event.id

    def for_snapshot(self, snapshot_id: str,
                     as_of: Optional[int] = None) -> list[TelemetryEvent]:
        return [e for e in self.events
                if e.snapshot_id == snapshot_id and (as_of is None or e.id <= as_of)]

    def summarize(self, snapshot_id: str, as_of: Optional[int] = None,
                  include_names: bool = False) -> TelemetrySummary:
        """Fold the event prefix for one snapshot.

        Unique viewers dedupe by actor across postings and versions,
        because the question creators ask is who saw the snapshot at all.
        Obfuscated views never count as views; they are reported apart.
        """
        views = 0
        obfuscated = 0
        reshares = 0
        comments = 0
        interactions = 0
        active_count = 0
        viewers: set[str] = set()
        reactions: dict[str, int] = {}
        per_channel: dict[str, int] = {}
        for event in self.for_snapshot(snapshot_id, as_of):
            if event.kind == "view":
                views += 1
                if event.actor_id:
                    viewers.add(event.actor_id)
                if event.channel_id:
                    per_channel[event.channel_id] = per_channel.get(event.channel_id, 0) + 1
            elif event.kind == "obfuscated-view":
                obfuscated += 1
            elif event.kind == "reshare":
                reshares += 1
            elif event.kind == "reaction":
                emoji = event.payload.get("emoji", "?")
                reactions[emoji] = reactions.get(emoji, 0) + 1
            elif event.kind == "comment":
                comments += 1
            elif event.kind == "interaction":
                interactions += 1
                if event.klass == "active":
                    active_count += 1
        return TelemetrySummary(
            views=views,
            unique_viewers=len(viewers),
            obfuscated_views=obfuscated,
            reshares=reshares,
            reactions=dict(sorted(reactions.items())),
            comments=comments,
            interactions=interactions,
            active_count=active_count,
            per_channel=dict(sorted(per_channel.items())),
            viewer_names=sorted(viewers) if include_names else None,
        )

    def latest_activity(self, snapshot_id: str) -> int:
        ids = [e.id for e in self.events if e.snapshot_id == snapshot_id]
        return max(ids) if ids else 0

    def to_dict(self) -> list[dict[str, Any]]:
        return [e.to_dict() for e in self.events]

    def load_dict(self, data: list[dict[str, Any]]) -> None:
        self.events = [TelemetryEvent.from_dict(e) for e in data]


def propagation(snapshot_id: str, postings: list[Any]) -> PropagationGraph:
    """Build the reshare forest for a snapshot from its postings.

    ``postings`` are collab postings (anything with id, channel_id,
    snapshot_id, version, parent_posting_id, posted_at). Every posting is a
    node; reshares add parent -> child edges; originals are roots.
    """
    mine = sorted((p for p in postings if p.snapshot_id == snapshot_id),
                  key=lambda p: p.id)
    nodes = [{"postingId": p.id, "channelId": p.channel_id,
              "version": p.version, "postedAt": p.posted_at.isoformat()}
             for p in mine]
    edges = [{"from": p.parent_posting_id, "to": p.id}
             for p in mine if p.parent_posting_id is not None]
    roots = [p.id for p in mine if p.parent_posting_id is None]
    return PropagationGraph(nodes=nodes, edges=edges, roots=roots)


def home_feed(creator_id: str, now: date, *, snapshot_store: Any,
              telemetry: TelemetryLog, compute_status: Callable[[Any, date], Any],
              include_names: bool = False) -> list[HomeFeedEntry]:
    """One entry per snapshot the creator owns, needs-attention first.

    Entries whose snapshot is stale or due for a scheduled update sort to
    the top, then by most recent engagement.
    """
    due = set(snapshot_store.due_updates(now))
    entries: list[HomeFeedEntry] = []
    for snapshot_id, snap in sorted(snapshot_store.snapshots.items()):
        head = snap.latest
        if head.creator_id != creator_id:
            continue
        status = compute_status(head, now)
        stale_and_due = status.freshness == "stale" or snapshot_id in due
        entries.append(HomeFeedEntry(
            snapshot_id=snapshot_id,
            latest_version=head.version,
            status=status.to_dict(),
            summary=telemetry.summarize(snapshot_id, include_names=include_names),
            stale_and_due=stale_and_due,
            latest_activity=telemetry.latest_activity(snapshot_id),
        ))
    entries.sort(key=lambda e: (not e.stale_and_due, -e.latest_activity, e.snapshot_id))
    return entries
