from __future__ import annotations

from datetime import date

import pytest

from snapshothub import NotFoundError
from snapshothub.telemetry import TelemetryLog

from conftest import april_frame, component_payload, seeded_hub
from oracles import oracle_fold_events


@pytest.fixture
def hub():
    h = seeded_hub(start=date(2022, 5, 1))
    h.create_channel({"id": "ch-leads", "name": "leads",
                      "members": ["u-ana", "u-bo", "u-cam"]})
    yield h
    h.close()


def make_posting(hub, channel="ch-sales"):
    component = hub.create_component(component_payload(
        "time-series", widget_id="w-weekly", overrides={"timeFrame": april_frame()}))
    snapshot = hub.compose_snapshot({
        "componentIds": [component["id"]],
        "curation": {"method": "stack"},
        "targetChannelId": channel,
        "policy": {"mode": "manual"},
        "reshareable": True,
        "creatorId": "u-ana",
    })
    posting = hub.post_snapshot(snapshot["snapshotId"], channel, "u-ana")
    return snapshot["snapshotId"], posting["id"]


class TestRecord:
    def test_ids_strictly_increase(self):
        log = TelemetryLog()
        first = log.record("view", snapshot_id="s", version=1, at=date(2022, 1, 1),
                           actor_id="u")
        second = log.record("view", snapshot_id="s", version=1, at=date(2022, 1, 1),
                            actor_id="u")
        assert (first, second) == (1, 2)

    def test_unknown_reference(self):
        log = TelemetryLog()
        with pytest.raises(NotFoundError) as err:
            log.record("view", snapshot_id="ghost", version=1, at=date(2022, 1, 1),
                       snapshot_exists=lambda s: False)
        assert err.value.code == "UnknownReference"

    def test_unknown_posting_reference(self):
        log = TelemetryLog()
        with pytest.raises(NotFoundError):
            log.record("view", snapshot_id="s", version=1, at=date(2022, 1, 1),
                       posting_id="ghost",
                       snapshot_exists=lambda s: True,
                       posting_exists=lambda p: False)

    def test_active_class_restricted_to_interactions(self):
        log = TelemetryLog()
        with pytest.raises(ValueError):
            log.record("view", snapshot_id="s", version=1, at=date(2022, 1, 1),
                       active=True)


class TestSummarize:
    def test_three_views_one_unique(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        for _ in range(3):
            hub.view_posting(posting_id, "u-bo", "wide")
        summary = hub.telemetry_summary(snapshot_id)
        assert summary["views"] == 3
        assert summary["uniqueViewers"] == 1

    def test_empty_log_all_zeros(self, hub):
        snapshot_id, _ = make_posting(hub)
        summary = hub.telemetry_summary(snapshot_id)
        assert summary["views"] == 0
        assert summary["uniqueViewers"] == 0
        assert summary["reshares"] == 0
        assert summary["reactions"] == {}

    def test_mixed_log_matches_fold_oracle(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        hub.view_posting(posting_id, "u-bo", "wide")
        hub.view_posting(posting_id, "u-cam", "wide")   # obfuscated
        reshared = hub.reshare_posting(posting_id, "ch-leads", "u-bo")
        hub.view_posting(reshared["id"], "u-ana", "narrow")
        hub.react(posting_id, "u-bo", "rocket")
        hub.react(reshared["id"], "u-ana", "chart")
        hub.comment("ch-sales", "u-bo", "why the dip?", thread_parent=posting_id)
        summary = hub.telemetry_summary(snapshot_id)
        expected = oracle_fold_events([e.to_dict() for e in hub.telemetry.events],
                                      snapshot_id)
        for key, value in expected.items():
            assert summary[key] == value, key
        assert summary["views"] == 2
        assert summary["obfuscatedViews"] == 1
        assert summary["perChannel"] == {"ch-leads": 1, "ch-sales": 1}

    def test_unique_dedupes_across_versions(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        hub.view_posting(posting_id, "u-bo", "wide")
        hub.tick("2022-06-01")
        hub.update_snapshot(snapshot_id, "manual")
        second_post = hub.post_snapshot(snapshot_id, "ch-sales", "u-ana")
        hub.view_posting(second_post["id"], "u-bo", "wide")
        summary = hub.telemetry_summary(snapshot_id)
        assert summary["views"] == 2
        assert summary["uniqueViewers"] == 1

    def test_monotone_in_asof(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        hub.view_posting(posting_id, "u-bo", "wide")
        hub.react(posting_id, "u-bo", "rocket")
        hub.view_posting(posting_id, "u-ana", "wide")
        log = hub.telemetry
        cumulative = [log.summarize(snapshot_id, as_of=t) for t in
                      range(len(log.events) + 1)]
        for before, after in zip(cumulative, cumulative[1:]):
            assert before.views <= after.views
            assert before.unique_viewers <= after.unique_viewers
            assert before.comments <= after.comments
            assert before.interactions <= after.interactions

    def test_viewer_names_behind_flag(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        hub.view_posting(posting_id, "u-bo", "wide")
        assert "viewerNames" not in hub.telemetry_summary(snapshot_id)
        hub.config.viewer_names_visible = True
        assert hub.telemetry_summary(snapshot_id)["viewerNames"] == ["u-bo"]


class TestPropagation:
    def test_single_posting(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        graph = hub.propagation_graph(snapshot_id)
        assert len(graph["nodes"]) == 1
        assert graph["edges"] == []
        assert graph["roots"] == [posting_id]

    def test_two_reshares_tree(self, hub):
        snapshot_id, posting_id = make_posting(hub)
        b = hub.reshare_posting(posting_id, "ch-leads", "u-bo")
        hub.create_channel({"id": "ch-x", "name": "x", "members": ["u-bo"]})
        c = hub.reshare_posting(posting_id, "ch-x", "u-bo")
        graph = hub.propagation_graph(snapshot_id)
        assert len(graph["nodes"]) == 3
        assert sorted(e["to"] for e in graph["edges"]) == sorted([b["id"], c["id"]])

    def test_two_roots_forest(self, hub):
        snapshot_id, first = make_posting(hub)
        second = hub.post_snapshot(snapshot_id, "ch-leads", "u-ana")
        hub.reshare_posting(second["id"], "ch-sales", "u-bo")
        graph = hub.propagation_graph(snapshot_id)
        assert len(graph["roots"]) == 2
        assert len(graph["nodes"]) == 3
        # Forest invariant: edges = nodes - roots.
        assert len(graph["edges"]) == len(graph["nodes"]) - len(graph["roots"])


class TestHomeFeed:
    def test_empty(self, hub):
        assert hub.home_feed("u-ana") == []

    def test_stale_sorts_first(self, hub):
        fresh_component = hub.create_component(component_payload(
            "time-series", widget_id="w-weekly",
            overrides={"timeFrame": dict(april_frame(), anchor="2022-05-01")}))
        fresh = hub.compose_snapshot({
            "componentIds": [fresh_component["id"]],
            "curation": {"method": "stack"}, "targetChannelId": "ch-sales",
            "policy": {"mode": "manual"}, "reshareable": True, "creatorId": "u-ana"})
        stale_id, posting_id = make_posting(hub)
        # Give the fresh snapshot the most recent activity; staleness must
        # still dominate the ordering.
        fresh_posting = hub.post_snapshot(fresh["snapshotId"], "ch-sales", "u-ana")
        hub.view_posting(fresh_posting["id"], "u-bo", "wide")
        feed = hub.home_feed("u-ana")
        assert [e["snapshotId"] for e in feed] == [stale_id, fresh["snapshotId"]]
        assert feed[0]["staleAndDue"] is True
        assert feed[1]["staleAndDue"] is False

    def test_ordering_matches_comparator_oracle(self, hub):
        ids = []
        for _ in range(3):
            snapshot_id, posting_id = make_posting(hub)
            ids.append((snapshot_id, posting_id))
        hub.view_posting(ids[1][1], "u-bo", "wide")
        feed = hub.home_feed("u-ana")
        entries = [(e["staleAndDue"], e["latestActivity"], e["snapshotId"]) for e in feed]
        expected = sorted(entries, key=lambda t: (not t[0], -t[1], t[2]))
        assert entries == expected

    def test_only_own_snapshots(self, hub):
        make_posting(hub)
        assert hub.home_feed("u-bo") == []
