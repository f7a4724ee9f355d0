from __future__ import annotations

import json
from datetime import date

import pytest
from fastapi.testclient import TestClient

from snapshothub import Hub, HubConfig, StorageError, ValidationError
from snapshothub.service import create_app

from conftest import april_frame, component_payload, seeded_hub


def run_session(hub) -> str:
    """A small mixed workload; returns the snapshot id it creates."""
    component = hub.create_component(component_payload(
        "time-series", widget_id="w-weekly", overrides={"timeFrame": april_frame()}))
    snapshot = hub.compose_snapshot({
        "componentIds": [component["id"]],
        "curation": {"method": "stack"},
        "targetChannelId": "ch-sales",
        "policy": {"mode": "interval", "intervalDays": 7},
        "reshareable": True,
        "creatorId": "u-ana",
    })
    posting = hub.post_snapshot(snapshot["snapshotId"], "ch-sales", "u-ana")
    hub.view_posting(posting["id"], "u-bo", "narrow")
    hub.view_posting(posting["id"], "u-cam", "wide")
    hub.react(posting["id"], "u-bo", "rocket")
    hub.comment("ch-sales", "u-bo", "solid month", thread_parent=posting["id"])
    hub.tick("2022-06-01")
    return snapshot["snapshotId"]


class TestJournalReplay:
    def test_restart_reproduces_state_hash(self, tmp_path):
        hub = seeded_hub(tmp_path)
        snapshot_id = run_session(hub)
        expected_hash = hub.state_hash()
        expected_summary = hub.telemetry_summary(snapshot_id)
        hub.close()

        recovered = Hub(HubConfig(data_dir=tmp_path))
        assert recovered.state_hash() == expected_hash
        assert recovered.telemetry_summary(snapshot_id) == expected_summary
        recovered.close()

    def test_fresh_data_dir_empty_state(self, tmp_path):
        hub = Hub(HubConfig(data_dir=tmp_path))
        # Only the clock-seeding record exists; domain state is empty.
        assert hub.seq == 1
        assert hub.list_datasets() == []
        assert hub.home_feed("anyone") == []
        hub.close()

    def test_truncated_line_raises_corrupt(self, tmp_path):
        hub = seeded_hub(tmp_path)
        run_session(hub)
        hub.close()
        journal_path = tmp_path / "journal.jsonl"
        lines = journal_path.read_text().splitlines()
        lines[3] = lines[3][: len(lines[3]) // 2]
        journal_path.write_text("\n".join(lines) + "\n")
        with pytest.raises(StorageError) as err:
            Hub(HubConfig(data_dir=tmp_path))
        assert err.value.code == "JournalCorrupt"
        assert err.value.details["seq"] == 4

    def test_prefix_replay_equals_prefix_state(self, tmp_path):
        """Killing the service between appends leaves a replayable prefix."""
        hub = seeded_hub(tmp_path / "full")
        run_session(hub)
        hub.close()
        journal_path = tmp_path / "full" / "journal.jsonl"
        all_lines = journal_path.read_text().splitlines()

        for prefix_len in (3, 7, len(all_lines) - 1):
            prefix_dir = tmp_path / f"prefix-{prefix_len}"
            prefix_dir.mkdir()
            (prefix_dir / "journal.jsonl").write_text(
                "\n".join(all_lines[:prefix_len]) + "\n")
            replayed = Hub(HubConfig(data_dir=prefix_dir))

            fresh = Hub(HubConfig())
            for line in all_lines[:prefix_len]:
                record = json.loads(line)
                fresh._replaying = True
                try:
                    fresh.execute(record["kind"], record["body"])
                finally:
                    fresh._replaying = False
            assert replayed.state_hash() == fresh.state_hash()
            replayed.close()

    def test_checkpoint_then_replay_equals_full_replay(self, tmp_path):
        hub = seeded_hub(tmp_path)
        component = hub.create_component(component_payload("categorical-breakdown"))
        hub.checkpoint()
        hub.compose_snapshot({
            "componentIds": [component["id"]],
            "curation": {"method": "stack"},
            "targetChannelId": "ch-sales",
            "policy": {"mode": "manual"},
            "reshareable": True,
            "creatorId": "u-ana",
        })
        full_hash = hub.state_hash()
        hub.close()

        recovered = Hub(HubConfig(data_dir=tmp_path))
        assert recovered.state_hash() == full_hash
        recovered.close()

        # Without the checkpoint the journal alone must agree too.
        (tmp_path / "checkpoint.json").unlink()
        journal_only = Hub(HubConfig(data_dir=tmp_path))
        assert journal_only.state_hash() == full_hash
        journal_only.close()

    def test_checkpoints_deterministic(self, tmp_path):
        hub = seeded_hub(tmp_path)
        first = hub.checkpoint()
        second = hub.checkpoint()
        assert first == second
        hub.close()

    def test_checkpoint_of_empty_state(self, tmp_path):
        hub = Hub(HubConfig(data_dir=tmp_path))
        record = hub.checkpoint()
        assert record["seq"] == 1
        assert record["state"]["store"]["snapshots"] == {}
        assert record["state"]["datasets"] == {}
        hub.close()

    def test_state_roundtrip_is_lossless(self, tmp_path):
        hub = seeded_hub(tmp_path)
        run_session(hub)
        state = hub.state_dict()
        other = Hub(HubConfig())
        other.load_state(state)
        assert other.state_dict() == state
        hub.close()


class TestScheduler:
    def make_interval_snapshot(self, hub, *, span, interval_days):
        # Frame ends exactly at the clock start so the first period
        # boundary falls on start + span.
        anchor = {"1-day": "2022-04-30", "14-day": "2022-04-17"}[span]
        unit_count = {"1-day": (1, "day"), "14-day": (2, "week")}[span]
        component = hub.create_component(component_payload(
            "time-series", widget_id="w-weekly", overrides={"timeFrame": {
                "temporalField": "order_date",
                "anchor": anchor,
                "span": {"count": unit_count[0], "unit": unit_count[1]},
                "bucketUnit": "day",
            }}))
        return hub.compose_snapshot({
            "componentIds": [component["id"]],
            "curation": {"method": "stack"},
            "targetChannelId": "ch-sales",
            "policy": {"mode": "interval", "intervalDays": interval_days},
            "reshareable": True,
            "creatorId": "u-ana",
        })["snapshotId"]

    def test_daily_and_biweekly_over_28_days(self, tmp_path):
        hub = seeded_hub(tmp_path, start=date(2022, 5, 1))
        daily = self.make_interval_snapshot(hub, span="1-day", interval_days=1)
        biweekly = self.make_interval_snapshot(hub, span="14-day", interval_days=14)
        result = hub.tick("2022-05-29")
        performed = result["performed"]
        assert sum(1 for p in performed if p["snapshotId"] == daily) == 28
        assert sum(1 for p in performed if p["snapshotId"] == biweekly) == 2
        assert hub.store.get(daily).latest.version == 29
        assert hub.store.get(biweekly).latest.version == 3
        hub.close()

    def test_zero_advance_is_noop(self, tmp_path):
        hub = seeded_hub(tmp_path)
        result = hub.tick("2022-05-01")
        assert result["performed"] == []
        hub.close()

    def test_regression_rejected(self, tmp_path):
        hub = seeded_hub(tmp_path)
        with pytest.raises(ValidationError) as err:
            hub.tick("2022-04-30")
        assert err.value.code == "ClockRegression"
        hub.close()

    def test_wall_clock_rejects_tick(self):
        hub = Hub(HubConfig(clock_mode="wall"))
        with pytest.raises(ValidationError) as err:
            hub.tick("2099-01-01")
        assert err.value.code == "WallClockMode"


class TestHttpApi:
    @pytest.fixture
    def client(self, tmp_path):
        hub = seeded_hub(tmp_path)
        with TestClient(create_app(hub)) as client:
            client.hub = hub
            yield client
        hub.close()

    def test_full_flow(self, client):
        resp = client.post("/components", json=component_payload(
            "time-series", widget_id="w-weekly", overrides={"timeFrame": april_frame()}))
        assert resp.status_code == 200, resp.text
        component = resp.json()

        resp = client.post("/snapshots", json={
            "componentIds": [component["id"]],
            "curation": {"method": "stack"},
            "targetChannelId": "ch-sales",
            "policy": {"mode": "manual"},
            "reshareable": True,
            "creatorId": "u-ana",
        })
        assert resp.status_code == 200
        snapshot_id = resp.json()["snapshotId"]

        resp = client.post("/postings", json={"snapshotId": snapshot_id,
                                              "channelId": "ch-sales"},
                           headers={"X-User-Id": "u-ana"})
        assert resp.status_code == 200
        posting_id = resp.json()["id"]

        resp = client.get(f"/postings/{posting_id}/view", params={"size": "narrow"},
                          headers={"X-User-Id": "u-bo"})
        assert resp.status_code == 200
        assert resp.json()["kind"] == "rendered"

        resp = client.get(f"/telemetry/snapshots/{snapshot_id}")
        assert resp.json()["views"] == 1

        resp = client.get(f"/snapshots/{snapshot_id}/status")
        assert resp.json()["status"]["freshness"] == "stale"

        resp = client.get(f"/snapshots/{snapshot_id}/versions")
        assert len(resp.json()) == 1

        resp = client.get(f"/snapshots/{snapshot_id}/hash")
        assert len(resp.json()["hash"]) == 64

        resp = client.get("/home/u-ana")
        assert len(resp.json()) == 1

    def test_error_shape_and_statuses(self, client):
        resp = client.get("/snapshots/snap-404/status")
        assert resp.status_code == 404
        body = resp.json()
        assert body["code"] == "UnknownSnapshot"
        assert "message" in body and "details" in body

        resp = client.post("/postings", json={"snapshotId": "snap-404",
                                              "channelId": "ch-sales"},
                           headers={"X-User-Id": "u-ana"})
        assert resp.status_code == 404

        resp = client.post("/admin/tick", json={"to": "2020-01-01"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "ClockRegression"

    def test_immutability_conflict_is_409(self, client):
        resp = client.post("/components", json=component_payload(
            "time-series", widget_id="w-weekly", overrides={"timeFrame": april_frame()}))
        component = resp.json()
        resp = client.post("/snapshots", json={
            "componentIds": [component["id"]],
            "curation": {"method": "stack"},
            "targetChannelId": "ch-sales",
            "policy": {"mode": "manual"},
            "reshareable": True,
            "creatorId": "u-ana",
        })
        snapshot_id = resp.json()["snapshotId"]
        stored_component = resp.json()["version"]["components"][0]["id"]
        resp = client.post(f"/components/{stored_component}/annotations", json={
            "annotation": {"kind": "circle", "anchor": {"x": 0.5, "y": 0.5},
                           "authorId": "u-ana"},
            "snapshotId": snapshot_id,
        })
        assert resp.status_code == 409
        assert resp.json()["code"] == "VersionImmutable"

    def test_gets_do_not_mutate_except_view(self, client):
        before = client.hub.state_hash()
        client.get("/dashboards/db-sales")
        client.get("/datasets")
        client.get("/channels/ch-sales")
        client.get("/home/u-ana")
        assert client.hub.state_hash() == before

    def test_dataset_upload_csv(self, client):
        resp = client.post("/datasets", json={
            "format": "csv", "name": "tiny",
            "content": "a,b\nx,1\ny,2\n"})
        assert resp.status_code == 200
        assert resp.json()["rowCount"] == 2

    def test_resolve_endpoint(self, client):
        resp = client.post("/selections/resolve", json={
            "dashboardId": "db-sales", "widgetId": "w-weekly",
            "overrides": {"timeFrame": april_frame()}})
        assert resp.status_code == 200
        rows = resp.json()["table"]["rows"]
        assert [r["value"] for r in rows] == [30.0, 70.0, 110.0, 150.0, 190.0]
