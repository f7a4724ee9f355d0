"""Domain errors with stable codes.

Every failure a caller can act on carries a machine-readable ``code`` plus a
``details`` dict so the HTTP layer and the CLI map errors without string
matching. The category (class) decides the HTTP status / exit code family.
"""

from __future__ import annotations

from typing import Any


class SnapshotHubError(Exception):
    """Base class for every domain error."""

    category = "error"

    def __init__(self, code: str, message: str, **details: Any) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


class ValidationError(SnapshotHubError):
    """Malformed or inconsistent input (HTTP 400, exit 2)."""

    category = "validation"


class NotFoundError(SnapshotHubError):
    """Referenced entity does not exist (HTTP 404, exit 4)."""

    category = "not-found"


class Forbidden(SnapshotHubError):
    """Actor lacks membership, grants, or ownership (HTTP 403, exit 3)."""

    category = "permission"


class Conflict(SnapshotHubError):
    """Operation clashes with stored state, e.g. immutability (HTTP 409, exit 2)."""

    category = "conflict"


class StorageError(SnapshotHubError):
    """Journal or filesystem failure (HTTP 500, exit 5)."""

    category = "io"
