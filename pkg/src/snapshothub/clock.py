"""Injectable day-granular clock.

The core model is day-granular, so the clock hands out dates. Virtual mode
advances only through explicit ticks and only forward, which makes the
scheduler and freshness boundaries deterministic under test; wall mode
reads the system date.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Any

from .canonical import parse_iso_date
from .errors import ValidationError

DEFAULT_VIRTUAL_START = date(2022, 1, 1)


@dataclass
class Clock:
    mode: str = "virtual"
    current: date = DEFAULT_VIRTUAL_START

    def __post_init__(self) -> None:
        if self.mode not in ("virtual", "wall"):
            raise ValidationError("ConfigInvalid", f"unknown clock mode {self.mode!r}")

    def today(self) -> date:
        if self.mode == "wall":
            return date.today()
        return self.current

    def tick_to(self, target: date) -> None:
        if self.mode != "virtual":
            raise ValidationError("WallClockMode", "tick requires a virtual clock")
        if target < self.current:
            raise ValidationError("ClockRegression",
                                  f"cannot tick backwards from {self.current} to {target}")
        self.current = target

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode, "now": self.current.isoformat()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Clock":
        return cls(mode=data["mode"], current=parse_iso_date(data["now"]))
