"""Canonical serialization shared by hashing, journaling, and golden files.

One byte-stable encoding everywhere: UTF-8 JSON, sorted keys, no extra
whitespace. Snapshot version hashes, journal lines, checkpoints, and the
chart-spec golden files all go through these two functions.
"""

from __future__ import annotations

import hashlib
import json
from datetime import date
from typing import Any


def canonical_json(value: Any) -> str:
    """Serialize to compact JSON with sorted keys. Dates become ISO strings."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, default=_default)


def canonical_hash(value: Any) -> str:
    """sha256 hex digest of the canonical JSON form."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def _default(obj: Any) -> Any:
    if isinstance(obj, date):
        return obj.isoformat()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not canonically serializable: {type(obj).__name__}")


def parse_iso_date(value: Any, *, what: str = "date") -> date:
    """Parse a YYYY-MM-DD string (or pass a date through)."""
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        try:
            return date.fromisoformat(value)
        except ValueError:
            pass
    raise ValueError(f"invalid {what}: {value!r} (expected YYYY-MM-DD)")
