"""Emulated collaboration platform: channels, postings, governance.

Two gates guard a posting. Channel membership decides whether a viewer can
address it at all; dataset grants decide whether they see data. A member
without grants for every dataset behind the snapshot gets an obfuscated
view that carries no data values, only a reason and the option to request
access from the creator. Consumer interactions re-resolve privately and
never touch channel-visible state.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from datetime import date
from typing import Any, Literal, Optional

from .canonical import parse_iso_date
from .datacore import Dataset, FilterPredicate
from .errors import Conflict, Forbidden, NotFoundError, ValidationError
from .snapshots import SnapshotStore, SnapshotVersion, build_component, compute_status
from .telemetry import TelemetryLog
from .templates import SizeClass, SIZE_CLASSES, responsive_variant


@dataclass
class User:
    id: str
    display_name: str
    dataset_grants: set[str] = dc_field(default_factory=set)

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "displayName": self.display_name,
                "datasetGrants": sorted(self.dataset_grants)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "User":
        return cls(id=data["id"], display_name=data.get("displayName", data["id"]),
                   dataset_grants=set(data.get("datasetGrants", [])))


@dataclass
class Channel:
    id: str
    name: str
    visibility: Literal["public", "private"]
    members: set[str] = dc_field(default_factory=set)

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name, "visibility": self.visibility,
                "members": sorted(self.members)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Channel":
        visibility = data.get("visibility", "public")
        if visibility not in ("public", "private"):
            raise ValidationError("InvalidChannel", f"unknown visibility {visibility!r}")
        members = set(data.get("members", []))
        if visibility == "private" and not members:
            raise ValidationError("InvalidChannel", "private channels require >=1 member")
        return cls(id=data["id"], name=data.get("name", data["id"]),
                   visibility=visibility, members=members)


@dataclass(frozen=True)
class Posting:
    id: str
    channel_id: str
    author_id: str
    snapshot_id: str
    version: int
    posted_at: date
    parent_posting_id: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "channelId": self.channel_id,
            "authorId": self.author_id,
            "snapshotRef": {"snapshotId": self.snapshot_id, "version": self.version},
            "parentPostingId": self.parent_posting_id,
            "postedAt": self.posted_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Posting":
        ref = data["snapshotRef"]
        return cls(id=data["id"], channel_id=data["channelId"], author_id=data["authorId"],
                   snapshot_id=ref["snapshotId"], version=ref["version"],
                   posted_at=parse_iso_date(data["postedAt"]),
                   parent_posting_id=data.get("parentPostingId"))


@dataclass(frozen=True)
class Message:
    id: str
    channel_id: str
    author_id: str
    text: str
    at: date
    thread_parent: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "channelId": self.channel_id, "authorId": self.author_id,
                "text": self.text, "threadParent": self.thread_parent,
                "at": self.at.isoformat()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Message":
        return cls(id=data["id"], channel_id=data["channelId"], author_id=data["authorId"],
                   text=data["text"], at=parse_iso_date(data["at"]),
                   thread_parent=data.get("threadParent"))


@dataclass(frozen=True)
class Reaction:
    target_id: str
    user_id: str
    emoji: str
    at: date

    def to_dict(self) -> dict[str, Any]:
        return {"targetId": self.target_id, "userId": self.user_id,
                "emoji": self.emoji, "at": self.at.isoformat()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Reaction":
        return cls(data["targetId"], data["userId"], data["emoji"],
                   parse_iso_date(data["at"]))


@dataclass
class AccessRequest:
    id: str
    posting_id: str
    requester_id: str
    state: Literal["pending", "granted", "denied"] = "pending"

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "postingId": self.posting_id,
                "requesterId": self.requester_id, "state": self.state}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AccessRequest":
        return cls(data["id"], data["postingId"], data["requesterId"], data["state"])


class Platform:
    """Channels, postings, messages, reactions, and the two access gates."""

    def __init__(self, snapshots: SnapshotStore, telemetry: TelemetryLog,
                 datasets: dict[str, Dataset]) -> None:
        self.snapshots = snapshots
        self.telemetry = telemetry
        self.datasets = datasets
        self.users: dict[str, User] = {}
        self.channels: dict[str, Channel] = {}
        self.postings: dict[str, Posting] = {}
        self.messages: dict[str, Message] = {}
        self.reactions: list[Reaction] = []
        self.access_requests: dict[str, AccessRequest] = {}

    # -- lookups ----------------------------------------------------------

    def user(self, user_id: str) -> User:
        if user_id not in self.users:
            raise NotFoundError("UnknownUser", f"no user {user_id!r}", user=user_id)
        return self.users[user_id]

    def channel(self, channel_id: str) -> Channel:
        if channel_id not in self.channels:
            raise NotFoundError("UnknownChannel", f"no channel {channel_id!r}",
                                channel=channel_id)
        return self.channels[channel_id]

    def posting(self, posting_id: str) -> Posting:
        if posting_id not in self.postings:
            raise NotFoundError("UnknownPosting", f"no posting {posting_id!r}",
                                posting=posting_id)
        return self.postings[posting_id]

    def _require_member(self, channel_id: str, user_id: str) -> Channel:
        channel = self.channel(channel_id)
        self.user(user_id)
        if user_id not in channel.members:
            raise Forbidden("NotAMember",
                            f"{user_id} is not a member of channel {channel_id}",
                            channel=channel_id, user=user_id)
        return channel

    def snapshot_datasets(self, version: SnapshotVersion) -> set[str]:
        return {c.selection.dataset_id for c in version.components}

    def _authorized(self, user: User, version: SnapshotVersion) -> bool:
        return self.snapshot_datasets(version) <= user.dataset_grants

    # -- postings ----------------------------------------------------------

    def post(self, snapshot_id: str, version: Optional[int], channel_id: str,
             author_id: str, now: date, *, posting_id: str) -> Posting:
        self._require_member(channel_id, author_id)
        snap = self.snapshots.get(snapshot_id)
        resolved = snap.version(version) if version is not None else snap.latest
        posting = Posting(id=posting_id, channel_id=channel_id, author_id=author_id,
                          snapshot_id=snapshot_id, version=resolved.version,
                          posted_at=now)
        self.postings[posting_id] = posting
        self.telemetry.record(
            "post", snapshot_id=snapshot_id, version=resolved.version,
            actor_id=author_id, posting_id=posting_id, channel_id=channel_id, at=now,
        )
        return posting

    def reshare(self, posting_id: str, target_channel_id: str, actor_id: str,
                now: date, *, new_posting_id: str) -> Posting:
        source = self.posting(posting_id)
        self._require_member(source.channel_id, actor_id)
        self._require_member(target_channel_id, actor_id)
        version = self.snapshots.get(source.snapshot_id).version(source.version)
        if not version.reshareable:
            raise Forbidden("ReshareForbidden",
                            f"snapshot {source.snapshot_id} may not be re-shared",
                            snapshot=source.snapshot_id)
        posting = Posting(id=new_posting_id, channel_id=target_channel_id,
                          author_id=actor_id, snapshot_id=source.snapshot_id,
                          version=source.version, posted_at=now,
                          parent_posting_id=source.id)
        self.postings[new_posting_id] = posting
        self.telemetry.record(
            "reshare", snapshot_id=source.snapshot_id, version=source.version,
            actor_id=actor_id, posting_id=new_posting_id, channel_id=target_channel_id,
            at=now, payload={"fromChannel": source.channel_id,
                             "toChannel": target_channel_id},
        )
        return posting

    # -- viewing -----------------------------------------------------------

    def view(self, posting_id: str, viewer_id: str, size: SizeClass,
             now: date) -> dict[str, Any]:
        """Render a posting for a viewer, or obfuscate it.

        Membership is checked first and raises; the grant check decides
        between the rendered and obfuscated shapes. Either way one passive
        telemetry event is appended, which is the only state change.
        """
        if size not in SIZE_CLASSES:
            raise ValidationError("InvalidSizeClass", f"unknown size class {size!r}")
        posting = self.posting(posting_id)
        self._require_member(posting.channel_id, viewer_id)
        viewer = self.user(viewer_id)
        version = self.snapshots.get(posting.snapshot_id).version(posting.version)

        if not self._authorized(viewer, version):
            self.telemetry.record(
                "obfuscated-view", snapshot_id=posting.snapshot_id,
                version=posting.version, actor_id=viewer_id, posting_id=posting_id,
                channel_id=posting.channel_id, at=now,
            )
            return {
                "kind": "obfuscated",
                "postingId": posting_id,
                "reason": "You do not have access to the underlying data of this snapshot.",
                "requestAccessAvailable": True,
            }

        self.telemetry.record(
            "view", snapshot_id=posting.snapshot_id, version=posting.version,
            actor_id=viewer_id, posting_id=posting_id, channel_id=posting.channel_id,
            at=now, payload={"size": size},
        )
        return self._render(posting, version, size, now)

    def _render(self, posting: Posting, version: SnapshotVersion, size: SizeClass,
                now: date) -> dict[str, Any]:
        status = compute_status(version, now)
        components = []
        for component in version.components:
            spec = component.chart_spec
            components.append({
                "id": component.id,
                "chartSpec": responsive_variant(spec, size).to_dict() if spec else None,
                "caption": component.caption.to_dict() if component.caption else None,
                "annotations": [a.to_dict() for a in component.annotations],
                "controls": [c.to_dict() for c in component.controls],
            })
        return {
            "kind": "rendered",
            "postingId": posting.id,
            "snapshotId": posting.snapshot_id,
            "version": version.version,
            "sizeClass": size,
            "status": status.to_dict(),
            "curation": version.curation.to_dict(),
            "components": components,
        }

    def interact(self, posting_id: str, viewer_id: str, control_id: str, value: str,
                 now: date) -> dict[str, Any]:
        """Apply a control value privately and return the re-rendered component.

        Nothing is posted to the channel; the result goes only to the
        caller. The telemetry event is active when the control is a call to
        action, passive otherwise.
        """
        posting = self.posting(posting_id)
        self._require_member(posting.channel_id, viewer_id)
        viewer = self.user(viewer_id)
        version = self.snapshots.get(posting.snapshot_id).version(posting.version)
        if not self._authorized(viewer, version):
            raise Forbidden("AccessDenied",
                            f"{viewer_id} lacks dataset access to interact with this snapshot",
                            user=viewer_id)

        component = None
        control = None
        for c in version.components:
            for ctl in c.controls:
                if ctl.id == control_id:
                    component, control = c, ctl
                    break
        if control is None or component is None:
            raise NotFoundError("UnknownRef", f"no control {control_id!r} on this posting",
                                control=control_id)
        if value not in control.allowed_values:
            raise ValidationError("InvalidControlValue",
                                  f"{value!r} is not an allowed value of {control_id}",
                                  control=control_id, value=value)

        selection = component.selection
        kept = tuple(p for p in selection.filters if p.field != control.field)
        filtered = replace(selection,
                           filters=kept + (FilterPredicate(control.field, "eq", value),))
        rebuilt = build_component(
            filtered, component.template_kind, component.params, self.datasets,
            component_id=component.id, scale=component.color_scale, now=now,
        )
        self.telemetry.record(
            "interaction", snapshot_id=posting.snapshot_id, version=posting.version,
            actor_id=viewer_id, posting_id=posting_id, channel_id=posting.channel_id,
            at=now, active=control.is_call_to_action,
            payload={"controlId": control_id, "value": value},
        )
        spec = rebuilt.chart_spec
        return {
            "kind": "private-rendered",
            "postingId": posting_id,
            "componentId": component.id,
            "control": {"id": control_id, "value": value},
            "chartSpec": responsive_variant(spec, "wide").to_dict() if spec else None,
            "caption": rebuilt.caption.to_dict() if rebuilt.caption else None,
        }

    # -- conversation -------------------------------------------------------

    def react(self, target_id: str, user_id: str, emoji: str, now: date) -> Reaction:
        """Add an emoji reaction to a posting or message; duplicates are no-ops."""
        if target_id in self.postings:
            channel_id = self.postings[target_id].channel_id
        elif target_id in self.messages:
            channel_id = self.messages[target_id].channel_id
        else:
            raise NotFoundError("UnknownRef", f"no posting or message {target_id!r}",
                                target=target_id)
        self._require_member(channel_id, user_id)
        for existing in self.reactions:
            if (existing.target_id, existing.user_id, existing.emoji) == (target_id, user_id, emoji):
                return existing
        reaction = Reaction(target_id=target_id, user_id=user_id, emoji=emoji, at=now)
        self.reactions.append(reaction)
        if target_id in self.postings:
            posting = self.postings[target_id]
            self.telemetry.record(
                "reaction", snapshot_id=posting.snapshot_id, version=posting.version,
                actor_id=user_id, posting_id=target_id, channel_id=channel_id,
                at=now, payload={"emoji": emoji},
            )
        return reaction

    def comment(self, channel_id: str, user_id: str, text: str, now: date, *,
                message_id: str, thread_parent: Optional[str] = None) -> Message:
        """Post a message, optionally threaded under a posting or message."""
        self._require_member(channel_id, user_id)
        root_posting: Optional[Posting] = None
        if thread_parent is not None:
            root = self._thread_root(thread_parent, channel_id)
            if isinstance(root, Posting):
                root_posting = root
        message = Message(id=message_id, channel_id=channel_id, author_id=user_id,
                          text=text, at=now, thread_parent=thread_parent)
        self.messages[message_id] = message
        if root_posting is not None:
            self.telemetry.record(
                "comment", snapshot_id=root_posting.snapshot_id,
                version=root_posting.version, actor_id=user_id,
                posting_id=root_posting.id, channel_id=channel_id, at=now,
                payload={"messageId": message_id},
            )
        return message

    def _thread_root(self, ref: str, channel_id: str) -> Posting | Message:
        seen = set()
        current = ref
        while True:
            if current in seen:
                raise ValidationError("InvalidThread", "thread parents form a cycle")
            seen.add(current)
            if current in self.postings:
                posting = self.postings[current]
                if posting.channel_id != channel_id:
                    raise ValidationError("InvalidThread",
                                          "thread parent lives in another channel")
                return posting
            if current in self.messages:
                message = self.messages[current]
                if message.channel_id != channel_id:
                    raise ValidationError("InvalidThread",
                                          "thread parent lives in another channel")
                if message.thread_parent is None:
                    return message
                current = message.thread_parent
                continue
            raise NotFoundError("UnknownRef", f"no posting or message {current!r}",
                                target=current)

    # -- access requests -----------------------------------------------------

    def request_access(self, posting_id: str, requester_id: str, *,
                       request_id: str) -> AccessRequest:
        """File (or return the pending) access request after an obfuscated view."""
        posting = self.posting(posting_id)
        self.user(requester_id)
        saw_obfuscated = any(
            e.kind == "obfuscated-view" and e.actor_id == requester_id
            and e.posting_id == posting_id
            for e in self.telemetry.events
        )
        if not saw_obfuscated:
            raise ValidationError("NotObfuscatedForUser",
                                  f"{requester_id} has not been shown an obfuscated view "
                                  f"of posting {posting_id}",
                                  posting=posting_id, user=requester_id)
        for existing in self.access_requests.values():
            if (existing.posting_id, existing.requester_id) == (posting_id, requester_id) \
                    and existing.state == "pending":
                return existing
        request = AccessRequest(id=request_id, posting_id=posting_id,
                                requester_id=requester_id)
        self.access_requests[request_id] = request
        return request

    def decide_access(self, request_id: str, decider_id: str,
                      decision: Literal["granted", "denied"]) -> AccessRequest:
        """Grant extends the requester's grants with the snapshot's datasets."""
        request = self.access_requests.get(request_id)
        if request is None:
            raise NotFoundError("UnknownRequest", f"no access request {request_id!r}",
                                request=request_id)
        if decision not in ("granted", "denied"):
            raise ValidationError("InvalidDecision", f"unknown decision {decision!r}")
        posting = self.posting(request.posting_id)
        version = self.snapshots.get(posting.snapshot_id).version(posting.version)
        if decider_id != version.creator_id:
            raise Forbidden("NotCreator",
                            f"only the snapshot creator may decide request {request_id}",
                            creator=version.creator_id, user=decider_id)
        if request.state != "pending":
            raise Conflict("RequestAlreadyDecided",
                           f"request {request_id} is already {request.state}")
        request.state = decision
        if decision == "granted":
            requester = self.user(request.requester_id)
            requester.dataset_grants |= self.snapshot_datasets(version)
        return request

    # -- channel content -------------------------------------------------

    def channel_feed(self, channel_id: str) -> dict[str, Any]:
        channel = self.channel(channel_id)
        postings = sorted((p for p in self.postings.values() if p.channel_id == channel_id),
                          key=lambda p: p.id)
        messages = sorted((m for m in self.messages.values() if m.channel_id == channel_id),
                          key=lambda m: m.id)
        reactions = [r for r in self.reactions
                     if r.target_id in {p.id for p in postings}
                     or r.target_id in {m.id for m in messages}]
        return {
            "channel": channel.to_dict(),
            "postings": [p.to_dict() for p in postings],
            "messages": [m.to_dict() for m in messages],
            "reactions": [r.to_dict() for r in reactions],
        }

    # -- state ------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "users": {uid: u.to_dict() for uid, u in sorted(self.users.items())},
            "channels": {cid: c.to_dict() for cid, c in sorted(self.channels.items())},
            "postings": {pid: p.to_dict() for pid, p in sorted(self.postings.items())},
            "messages": {mid: m.to_dict() for mid, m in sorted(self.messages.items())},
            "reactions": [r.to_dict() for r in self.reactions],
            "accessRequests": {rid: r.to_dict()
                               for rid, r in sorted(self.access_requests.items())},
        }

    def load_dict(self, data: dict[str, Any]) -> None:
        self.users = {uid: User.from_dict(u) for uid, u in data.get("users", {}).items()}
        self.channels = {cid: Channel.from_dict(c)
                         for cid, c in data.get("channels", {}).items()}
        self.postings = {pid: Posting.from_dict(p)
                         for pid, p in data.get("postings", {}).items()}
        self.messages = {mid: Message.from_dict(m)
                         for mid, m in data.get("messages", {}).items()}
        self.reactions = [Reaction.from_dict(r) for r in data.get("reactions", [])]
        self.access_requests = {rid: AccessRequest.from_dict(r)
                                for rid, r in data.get("accessRequests", {}).items()}
