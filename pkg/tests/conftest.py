from __future__ import annotations

import json
from datetime import date
from pathlib import Path

import pytest

from snapshothub import Hub, HubConfig, load_dataset

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

SALES_CSV = FIXTURES / "sales.csv"

# Keep in sync with fixtures/sales.csv; tests hand-verify against these.
SALES_ROWS = [
    ("East", "A", 250.0, 25.0, date(2022, 3, 7)),
    ("East", "A", 5.0, 0.5, date(2022, 3, 15)),
    ("West", "B", 245.0, 24.5, date(2022, 3, 21)),
    ("East", "A", 10.0, 1.0, date(2022, 4, 1)),
    ("West", "B", 20.0, 2.0, date(2022, 4, 4)),
    ("East", "A", 30.0, 3.0, date(2022, 4, 8)),
    ("East", "B", 40.0, 4.0, date(2022, 4, 11)),
    ("West", "A", 50.0, 5.0, date(2022, 4, 15)),
    ("East", "A", 60.0, 6.0, date(2022, 4, 18)),
    ("West", "B", 70.0, 7.0, date(2022, 4, 22)),
    ("East", "B", 80.0, 8.0, date(2022, 4, 25)),
    ("East", "A", 90.0, 9.0, date(2022, 4, 29)),
    ("West", "A", 100.0, 10.0, date(2022, 4, 30)),
    ("West", "B", 7.0, 0.7, date(2022, 5, 2)),
    ("East", "B", 9.0, 0.9, date(2022, 6, 10)),
]


@pytest.fixture(scope="session")
def sales_dataset():
    return load_dataset(SALES_CSV.read_bytes(), "csv", dataset_id="ds-1", name="sales")


@pytest.fixture
def sales_rows(sales_dataset):
    return list(sales_dataset.rows)


def sales_dashboard_doc(dataset_id: str = "ds-1") -> dict:
    return {
        "id": "db-sales",
        "title": "Regional Sales",
        "colorScales": {
            "regions": {
                "kind": "categorical",
                "mapping": {"East": "#1f77b4", "West": "#ff7f0e"},
            }
        },
        "globalFilters": [],
        "widgets": [
            {
                "id": "w-by-region",
                "title": "Sales by region",
                "chartKind": "bar",
                "datasetId": dataset_id,
                "measures": ["sales", "units"],
                "dimensions": ["region"],
                "temporalField": "order_date",
                "colorScale": "regions",
            },
            {
                "id": "w-total",
                "title": "Total sales",
                "chartKind": "single-value",
                "datasetId": dataset_id,
                "measures": ["sales"],
            },
            {
                "id": "w-weekly",
                "title": "Weekly sales",
                "chartKind": "line",
                "datasetId": dataset_id,
                "measures": ["sales"],
                "temporalField": "order_date",
            },
        ],
    }


def april_frame(bucket_unit: str = "week") -> dict:
    return {
        "temporalField": "order_date",
        "anchor": "2022-04-01",
        "span": {"count": 1, "unit": "month"},
        "bucketUnit": bucket_unit,
    }


def make_hub(tmp_path: Path | None = None, *, start: date = date(2022, 5, 1)) -> Hub:
    config = HubConfig(data_dir=tmp_path, clock_mode="virtual", clock_start=start)
    return Hub(config)


def seeded_hub(tmp_path: Path | None = None, *, start: date = date(2022, 5, 1)) -> Hub:
    """Hub with the sales dataset, dashboard, two users, and a channel."""
    hub = make_hub(tmp_path, start=start)
    result = hub.ingest_dataset(SALES_CSV.read_bytes(), "csv", None, "sales")
    dataset_id = result["datasetId"]
    hub.create_dashboard(sales_dashboard_doc(dataset_id))
    hub.create_user({"id": "u-ana", "displayName": "Ana", "datasetGrants": [dataset_id]})
    hub.create_user({"id": "u-bo", "displayName": "Bo", "datasetGrants": [dataset_id]})
    hub.create_user({"id": "u-cam", "displayName": "Cam"})
    hub.create_channel({"id": "ch-sales", "name": "sales",
                        "visibility": "public",
                        "members": ["u-ana", "u-bo", "u-cam"]})
    return hub


def component_payload(kind: str, params: dict | None = None, *,
                      overrides: dict | None = None,
                      widget_id: str = "w-by-region") -> dict:
    payload: dict = {
        "dashboardId": "db-sales",
        "widgetId": widget_id,
        "templateKind": kind,
    }
    if params:
        payload["params"] = params
    if overrides:
        payload["overrides"] = overrides
    return payload


def write_json(path: Path, doc: dict) -> Path:
    path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return path
