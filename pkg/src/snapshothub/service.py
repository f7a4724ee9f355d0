"""HTTP/JSON API over the hub.

Bodies mirror the domain types one-to-one and validation happens in the
hub, so the CLI's spec files and these endpoints share a single validator.
Acting users are simulated identities passed in the ``X-User-Id`` header
(no authentication protocol). Errors come back as
``{"code", "message", "details"}`` with 4xx for precondition failures and
409 for immutability violations. The only GET with a side effect is
``/postings/{id}/view``, which appends the view telemetry event.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse

from .errors import SnapshotHubError, ValidationError
from .hub import Hub

_STATUS_BY_CATEGORY = {
    "validation": 400,
    "not-found": 404,
    "permission": 403,
    "conflict": 409,
    "io": 500,
}


def create_app(hub: Hub) -> FastAPI:
    app = FastAPI(title="snapshothub", version="0.1.0")

    @app.exception_handler(SnapshotHubError)
    async def _domain_error(_request: Request, exc: SnapshotHubError) -> JSONResponse:
        status = _STATUS_BY_CATEGORY.get(exc.category, 500)
        return JSONResponse(status_code=status, content=exc.to_dict())

    def actor(header_value: Optional[str], body_value: Optional[str] = None) -> str:
        user = header_value or body_value
        if not user:
            raise ValidationError("MissingActor",
                                  "pass the acting user in the X-User-Id header")
        return user

    @app.get("/healthz")
    def healthz() -> dict[str, Any]:
        return {"status": "ok", "now": hub.now().isoformat(), "seq": hub.seq}

    # -- data -------------------------------------------------------------

    @app.post("/datasets")
    def post_dataset(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        fmt = payload.get("format", "json-records")
        name = payload.get("name", "dataset")
        hint = payload.get("schemaHint")
        if fmt == "csv":
            return hub.ingest_dataset(payload.get("content", ""), "csv", hint, name)
        if "rows" in payload and "content" not in payload:
            return hub.ingest_dataset(_as_json(payload["rows"]), "json-records", hint, name)
        return hub.ingest_dataset(payload.get("content", ""), "json-records", hint, name)

    @app.get("/datasets")
    def get_datasets() -> list[dict[str, Any]]:
        return hub.list_datasets()

    @app.post("/dashboards")
    def post_dashboard(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.create_dashboard(payload)

    @app.get("/dashboards")
    def get_dashboards() -> list[dict[str, Any]]:
        return hub.list_dashboards()

    @app.get("/dashboards/{dashboard_id}")
    def get_dashboard(dashboard_id: str) -> dict[str, Any]:
        return hub.get_dashboard(dashboard_id)

    @app.post("/selections/resolve")
    def resolve_selection(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.resolve_payload(payload)

    # -- components and snapshots -----------------------------------------

    @app.post("/components")
    def post_component(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.create_component(payload)

    @app.get("/components/{component_id}")
    def get_component(component_id: str) -> dict[str, Any]:
        return hub.get_component(component_id)

    @app.post("/components/{component_id}/annotations")
    def post_annotation(component_id: str,
                        payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.annotate_component(component_id, payload.get("annotation", payload),
                                      payload.get("snapshotId"))

    @app.post("/components/{component_id}/controls")
    def post_control(component_id: str,
                     payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.add_control(component_id, payload.get("control", payload))

    @app.post("/snapshots")
    def post_snapshot(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.compose_snapshot(payload)

    @app.get("/snapshots/{snapshot_id}/versions")
    def get_versions(snapshot_id: str) -> list[dict[str, Any]]:
        return hub.version_history(snapshot_id)

    @app.get("/snapshots/{snapshot_id}/hash")
    def get_version_hash(snapshot_id: str,
                         version: Optional[int] = Query(default=None)) -> dict[str, Any]:
        return hub.version_hash(snapshot_id, version)

    @app.post("/snapshots/{snapshot_id}/update")
    def update_snapshot(snapshot_id: str,
                        payload: dict[str, Any] = Body(default={}),
                        x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        trigger = payload.get("trigger", "manual")
        actor_id = payload.get("actorId") or x_user_id
        return hub.update_snapshot(snapshot_id, trigger, actor_id)

    @app.get("/snapshots/{snapshot_id}/status")
    def get_status(snapshot_id: str) -> dict[str, Any]:
        return hub.snapshot_status(snapshot_id)

    # -- platform ----------------------------------------------------------

    @app.post("/users")
    def post_user(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.create_user(payload)

    @app.get("/users")
    def get_users() -> list[dict[str, Any]]:
        return hub.list_users()

    @app.post("/channels")
    def post_channel(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.create_channel(payload)

    @app.get("/channels")
    def get_channels() -> list[dict[str, Any]]:
        return hub.list_channels()

    @app.get("/channels/{channel_id}")
    def get_channel(channel_id: str) -> dict[str, Any]:
        return hub.channel_feed(channel_id)

    @app.post("/channels/{channel_id}/members")
    def post_member(channel_id: str,
                    payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.add_member(channel_id, payload["userId"])

    @app.post("/channels/{channel_id}/messages")
    def post_message(channel_id: str, payload: dict[str, Any] = Body(...),
                     x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.comment(channel_id, actor(x_user_id, payload.get("userId")),
                           payload["text"], payload.get("threadParent"))

    @app.post("/postings")
    def post_posting(payload: dict[str, Any] = Body(...),
                     x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.post_snapshot(payload["snapshotId"], payload["channelId"],
                                 actor(x_user_id, payload.get("authorId")),
                                 payload.get("version"))

    @app.get("/postings/{posting_id}")
    def get_posting(posting_id: str) -> dict[str, Any]:
        return hub.get_posting(posting_id)

    @app.post("/postings/{posting_id}/reshare")
    def reshare(posting_id: str, payload: dict[str, Any] = Body(...),
                x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.reshare_posting(posting_id, payload["targetChannelId"],
                                   actor(x_user_id, payload.get("actorId")))

    @app.get("/postings/{posting_id}/view")
    def view(posting_id: str, size: str = Query(default="wide"),
             x_user_id: Optional[str] = Header(default=None),
             viewer: Optional[str] = Query(default=None)) -> dict[str, Any]:
        return hub.view_posting(posting_id, actor(x_user_id, viewer), size)

    @app.post("/postings/{posting_id}/interact")
    def interact(posting_id: str, payload: dict[str, Any] = Body(...),
                 x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.interact(posting_id, actor(x_user_id, payload.get("viewerId")),
                            payload["controlId"], payload["value"])

    @app.post("/postings/{posting_id}/reactions")
    def react(posting_id: str, payload: dict[str, Any] = Body(...),
              x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.react(posting_id, actor(x_user_id, payload.get("userId")),
                         payload["emoji"])

    @app.post("/messages/{message_id}/reactions")
    def react_message(message_id: str, payload: dict[str, Any] = Body(...),
                      x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.react(message_id, actor(x_user_id, payload.get("userId")),
                         payload["emoji"])

    @app.post("/access-requests")
    def request_access(payload: dict[str, Any] = Body(...),
                       x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.request_access(payload["postingId"],
                                  actor(x_user_id, payload.get("requesterId")))

    @app.post("/access-requests/{request_id}/decision")
    def decide_access(request_id: str, payload: dict[str, Any] = Body(...),
                      x_user_id: Optional[str] = Header(default=None)) -> dict[str, Any]:
        return hub.decide_access(request_id, actor(x_user_id, payload.get("deciderId")),
                                 payload["decision"])

    # -- telemetry ---------------------------------------------------------

    @app.get("/telemetry/snapshots/{snapshot_id}")
    def telemetry_summary(snapshot_id: str) -> dict[str, Any]:
        return hub.telemetry_summary(snapshot_id)

    @app.get("/telemetry/snapshots/{snapshot_id}/propagation")
    def telemetry_propagation(snapshot_id: str) -> dict[str, Any]:
        return hub.propagation_graph(snapshot_id)

    @app.get("/home/{creator_id}")
    def home(creator_id: str) -> list[dict[str, Any]]:
        return hub.home_feed(creator_id)

    # -- admin -------------------------------------------------------------

    @app.post("/admin/tick")
    def tick(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        return hub.tick(payload["to"])

    @app.post("/admin/checkpoint")
    def checkpoint() -> dict[str, Any]:
        record = hub.checkpoint()
        return {"seq": record["seq"]}

    @app.get("/admin/state-hash")
    def state_hash() -> dict[str, Any]:
        return {"hash": hub.state_hash(), "seq": hub.seq}

    return app


def _as_json(rows: list[dict[str, Any]]) -> str:
    return json.dumps(rows)


def serve(config_or_hub, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service with uvicorn (production entry, wall clock by default)."""
    import uvicorn

    hub = config_or_hub if isinstance(config_or_hub, Hub) else Hub(config_or_hub)
    if not isinstance(port, int) or not 0 < port < 65536:
        raise ValidationError("ConfigInvalid", f"invalid port {port!r}")
    uvicorn.run(create_app(hub), host=host, port=port, log_level="warning")
