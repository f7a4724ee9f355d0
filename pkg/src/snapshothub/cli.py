"""Scripting front door: everything the UI can do, from the shell.

Commands operate on a data directory (embedded mode): each invocation
opens the journal, applies its command, and exits, so a sequence of CLI
calls is exactly equivalent to the same sequence of API calls against a
service on that directory. ``snapshothub serve`` runs the HTTP API.

Exit codes: 0 ok, 2 validation, 3 permission, 4 not found, 5 io.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path
from typing import Any, Optional

import click

from .canonical import canonical_hash, canonical_json
from .errors import SnapshotHubError, ValidationError
from .hub import Hub, HubConfig

_EXIT_BY_CATEGORY = {
    "validation": 2,
    "conflict": 2,
    "permission": 3,
    "not-found": 4,
    "io": 5,
}


def _fail(exc: SnapshotHubError) -> None:
    click.echo(f"error [{exc.code}]: {exc.message}", err=True)
    sys.exit(_EXIT_BY_CATEGORY.get(exc.category, 1))


def _open_hub(ctx: click.Context) -> Hub:
    params = ctx.obj
    try:
        config = HubConfig(
            data_dir=params["data_dir"],
            clock_mode=params["clock"],
            clock_start=date.fromisoformat(params["start_date"]),
            viewer_names_visible=params.get("viewer_names", False),
        )
        return Hub(config)
    except SnapshotHubError as exc:
        _fail(exc)
        raise AssertionError("unreachable")


def _run(ctx: click.Context, action) -> Any:
    hub = _open_hub(ctx)
    try:
        return action(hub)
    except SnapshotHubError as exc:
        _fail(exc)
    finally:
        hub.close()


@click.group()
@click.option("--data-dir", envvar="SNAPSHOTHUB_DATA", default="./snapshothub-data",
              type=click.Path(path_type=Path), help="Journal/checkpoint directory.")
@click.option("--clock", type=click.Choice(["virtual", "wall"]), default="virtual",
              help="Clock mode; virtual is deterministic and driven by `tick`.")
@click.option("--start-date", default="2022-01-01",
              help="Initial date of a fresh virtual clock.")
@click.option("--viewer-names", is_flag=True, default=False,
              envvar="SNAPSHOTHUB_VIEWER_NAMES",
              help="Expose viewer names (not just counts) in telemetry summaries.")
@click.pass_context
def main(ctx: click.Context, data_dir: Path, clock: str, start_date: str,
         viewer_names: bool) -> None:
    """Create, share, update, and report on dashboard snapshots."""
    ctx.ensure_object(dict)
    ctx.obj.update(data_dir=data_dir, clock=clock, start_date=start_date,
                   viewer_names=viewer_names)


@main.command()
@click.argument("path", type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["csv", "json-records"]), default="csv")
@click.option("--schema-hint", default=None,
              help='JSON mapping of field name to kind, e.g. \'{"region": "dimension"}\'.')
@click.option("--name", default=None, help="Dataset display name (defaults to file stem).")
@click.pass_context
def ingest(ctx: click.Context, path: Path, fmt: str, schema_hint: Optional[str],
           name: Optional[str]) -> None:
    """Load a CSV or json-records file; prints the new dataset id."""
    try:
        hint = json.loads(schema_hint) if schema_hint else None
    except json.JSONDecodeError as exc:
        click.echo(f"error [InvalidSchemaHint]: {exc}", err=True)
        sys.exit(2)
    content = path.read_bytes()
    result = _run(ctx, lambda hub: hub.ingest_dataset(content, fmt, hint,
                                                      name or path.stem))
    click.echo(result["datasetId"])


@main.group()
def dashboard() -> None:
    """Dashboard definitions."""


@dashboard.command("create")
@click.argument("path", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def dashboard_create(ctx: click.Context, path: Path) -> None:
    """Register a dashboard from a JSON definition document."""
    doc = _read_json(path)
    result = _run(ctx, lambda hub: hub.create_dashboard(doc))
    click.echo(result["dashboardId"])


@main.group()
def user() -> None:
    """Simulated platform identities."""


@user.command("create")
@click.argument("user_id")
@click.option("--name", default=None)
@click.option("--grant", "grants", multiple=True, help="Dataset id to grant (repeatable).")
@click.pass_context
def user_create(ctx: click.Context, user_id: str, name: Optional[str],
                grants: tuple[str, ...]) -> None:
    doc = {"id": user_id, "displayName": name or user_id,
           "datasetGrants": list(grants)}
    result = _run(ctx, lambda hub: hub.create_user(doc))
    click.echo(result["userId"])


@main.group()
def channel() -> None:
    """Conversation channels."""


@channel.command("create")
@click.argument("name")
@click.option("--id", "channel_id", default=None)
@click.option("--private", is_flag=True, default=False)
@click.option("--member", "members", multiple=True)
@click.pass_context
def channel_create(ctx: click.Context, name: str, channel_id: Optional[str],
                   private: bool, members: tuple[str, ...]) -> None:
    doc: dict[str, Any] = {"name": name,
                           "visibility": "private" if private else "public",
                           "members": list(members)}
    if channel_id:
        doc["id"] = channel_id
    result = _run(ctx, lambda hub: hub.create_channel(doc))
    click.echo(result["channelId"])


@main.group()
def snapshot() -> None:
    """Snapshot lifecycle."""


@snapshot.command("create")
@click.argument("specfile", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def snapshot_create(ctx: click.Context, specfile: Path) -> None:
    """Create components and compose one snapshot from a declarative spec file.

    The file uses the same JSON schema as the API bodies: a creator, a
    target channel, curation, policy, reshare flag, and a list of
    component payloads (selection or widget reference, template kind,
    params, annotations, controls).
    """
    doc = _read_json(specfile)

    def build(hub: Hub) -> dict[str, Any]:
        component_ids = []
        for payload in doc.get("components", []):
            component = hub.create_component(payload)
            component_ids.append(component["id"])
        return hub.compose_snapshot({
            "componentIds": component_ids,
            "curation": doc.get("curation", {"method": "stack"}),
            "targetChannelId": doc["targetChannel"],
            "policy": doc.get("policy"),
            "reshareable": doc.get("reshareable", True),
            "creatorId": doc["creator"],
            "completenessNote": doc.get("completenessNote"),
        })

    result = _run(ctx, build)
    click.echo(result["snapshotId"])


@main.command()
@click.argument("snapshot_id")
@click.argument("channel_id")
@click.option("--author", required=True)
@click.option("--version", type=int, default=None)
@click.pass_context
def post(ctx: click.Context, snapshot_id: str, channel_id: str, author: str,
         version: Optional[int]) -> None:
    """Post a snapshot version into a channel."""
    result = _run(ctx, lambda hub: hub.post_snapshot(snapshot_id, channel_id,
                                                     author, version))
    click.echo(result["id"])


@main.command()
@click.argument("snapshot_id")
@click.option("--trigger", type=click.Choice(["manual", "scheduled", "consumer"]),
              default="manual")
@click.option("--actor", default=None)
@click.pass_context
def update(ctx: click.Context, snapshot_id: str, trigger: str,
           actor: Optional[str]) -> None:
    """Advance time frames and append the next version."""
    result = _run(ctx, lambda hub: hub.update_snapshot(snapshot_id, trigger, actor))
    click.echo(f"{snapshot_id} v{result['version']['version']}")


@main.command()
@click.option("--to", "to_date", required=True, help="Virtual date to advance to.")
@click.pass_context
def tick(ctx: click.Context, to_date: str) -> None:
    """Advance the virtual clock, applying scheduled updates along the way."""
    result = _run(ctx, lambda hub: hub.tick(to_date))
    for performed in result["performed"]:
        click.echo(f"updated {performed['snapshotId']} "
                   f"to v{performed['version']} at {performed['at']}")
    click.echo(f"now {result['now']}")


@main.command()
@click.argument("snapshot_id")
@click.pass_context
def report(ctx: click.Context, snapshot_id: str) -> None:
    """Print the telemetry summary and propagation edges for a snapshot."""

    def gather(hub: Hub) -> dict[str, Any]:
        return {"summary": hub.telemetry_summary(snapshot_id),
                "propagation": hub.propagation_graph(snapshot_id)}

    result = _run(ctx, gather)
    click.echo(canonical_json(result["summary"]))
    for edge in result["propagation"]["edges"]:
        click.echo(f"{edge['from']} -> {edge['to']}")


@main.command("hash")
@click.argument("snapshot_id")
@click.option("--version", type=int, default=None)
@click.pass_context
def hash_cmd(ctx: click.Context, snapshot_id: str, version: Optional[int]) -> None:
    """Print the canonical hash of a stored snapshot version."""

    def compute(hub: Hub) -> str:
        versions = hub.store.version_history(snapshot_id)
        if version is not None:
            versions = [v for v in versions if v.version == version]
            if not versions:
                raise ValidationError("UnknownVersion",
                                      f"snapshot {snapshot_id} has no version {version}")
        return canonical_hash(versions[-1].to_dict())

    click.echo(_run(ctx, compute))


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.pass_context
def serve(ctx: click.Context, port: int, host: str) -> None:
    """Run the HTTP API on the data directory."""
    from .service import serve as run_service

    hub = _open_hub(ctx)
    try:
        run_service(hub, host=host, port=port)
    except SnapshotHubError as exc:
        _fail(exc)


def _read_json(path: Path) -> dict[str, Any]:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        click.echo(f"error [MalformedSpecFile]: {path}: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
