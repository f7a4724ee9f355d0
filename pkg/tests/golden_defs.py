"""Shared definitions of the golden template instantiations on the fixture.

Each entry: template kind -> (component payload, hand-computed caption).
The captions were derived independently from the fixture rows (region and
weekly sums worked out by hand) before the goldens were frozen; the golden
test and the generator both assert them.
"""

from __future__ import annotations

APRIL_WEEKLY = {
    "temporalField": "order_date",
    "anchor": "2022-04-01",
    "span": {"count": 1, "unit": "month"},
    "bucketUnit": "week",
}

APRIL_MONTHLY = dict(APRIL_WEEKLY, bucketUnit="month")

APRIL_RANGE_FILTER = [{"field": "order_date", "op": "range",
                       "value": ["2022-04-01", "2022-04-30"]}]


def golden_cases() -> dict[str, tuple[dict, str | None]]:
    return {
        "categorical-breakdown": (
            {
                "dashboardId": "db-sales", "widgetId": "w-by-region",
                "templateKind": "categorical-breakdown",
                "colorScale": "regions",
            },
            # East 574 vs West 492 over all fixture rows.
            "East leads with 574 (53.8% of 1,066).",
        ),
        "goal-breakdown": (
            {
                "dashboardId": "db-sales", "widgetId": "w-total",
                "templateKind": "goal-breakdown",
                "overrides": {"timeFrame": APRIL_MONTHLY},
                "params": {"goal": 600},
            },
            # April total 550 against the goal of 600.
            "550 reaches 91.7% of goal 600.",
        ),
        "ratio-breakdown": (
            {
                "dashboardId": "db-sales", "widgetId": "w-by-region",
                "templateKind": "ratio-breakdown",
                "overrides": {"filters": APRIL_RANGE_FILTER},
                "colorScale": "regions",
            },
            # April split: East 310, West 240.
            "East accounts for 56.4% of 550.",
        ),
        "time-series": (
            {
                "dashboardId": "db-sales", "widgetId": "w-weekly",
                "templateKind": "time-series",
                "overrides": {"timeFrame": APRIL_WEEKLY},
            },
            # Weekly sums 30/70/110/150/190.
            "The series totals 550 over 5 weeks, with the latest at 190.",
        ),
        "value-vs-threshold": (
            {
                "dashboardId": "db-sales", "widgetId": "w-total",
                "templateKind": "value-vs-threshold",
                "overrides": {"timeFrame": APRIL_MONTHLY},
                "params": {"threshold": [400, 600]},
            },
            "Value 550 is within the range 400 to 600.",
        ),
        "series-vs-threshold": (
            {
                "dashboardId": "db-sales", "widgetId": "w-weekly",
                "templateKind": "series-vs-threshold",
                "overrides": {"timeFrame": APRIL_WEEKLY},
                "params": {"threshold": [50, 180]},
            },
            # Week one (30) dips below, week five (190) rises above.
            "2 of 5 points fall outside the range 50 to 180.",
        ),
        "time-over-time": (
            {
                "dashboardId": "db-sales", "widgetId": "w-weekly",
                "templateKind": "time-over-time",
                "overrides": {"timeFrame": APRIL_WEEKLY},
                "params": {"comparisonOffset": {"count": 1, "unit": "month"}},
            },
            # April 550 vs March 500.
            "Current total 550 is +10.0% vs the prior period (500).",
        ),
        "trend-correlation": (
            {
                "dashboardId": "db-sales", "widgetId": "w-weekly",
                "templateKind": "trend-correlation",
                "overrides": {"timeFrame": APRIL_WEEKLY},
                "params": {"secondMeasure": "units"},
            },
            # units is sales/10 in every row, so r is exactly 1.
            "The trend is increasing (r=1).",
        ),
        "preserve-original": (
            {
                "dashboardId": "db-sales", "widgetId": "w-by-region",
                "templateKind": "preserve-original",
            },
            None,
        ),
    }
