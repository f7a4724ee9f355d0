"""Append-only command journal with checkpointing.

Persistence is event-sourced: every state-changing command is one
canonical-JSON line ``{"seq": n, "kind": ..., "body": ...}`` with seq
contiguous from 1. Replaying the journal against an empty hub reproduces
the exact state; a checkpoint materializes the state at some seq so replay
can skip the prefix. Lines are written in single ``write`` calls, so a
crash between commands never leaves a torn line behind.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterator, Optional

from .canonical import canonical_json
from .errors import StorageError

JOURNAL_FILE = "journal.jsonl"
CHECKPOINT_FILE = "checkpoint.json"


class Journal:
    def __init__(self, data_dir: Path) -> None:
        self.data_dir = Path(data_dir)
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError("IoFailure", f"cannot create data dir {data_dir}: {exc}") from exc
        self.path = self.data_dir / JOURNAL_FILE
        self._handle = None

    def _file(self):
        if self._handle is None:
            try:
                self._handle = open(self.path, "a", encoding="utf-8")
            except OSError as exc:
                raise StorageError("IoFailure", f"cannot open journal: {exc}") from exc
        return self._handle

    def append(self, seq: int, kind: str, body: dict[str, Any]) -> None:
        line = canonical_json({"seq": seq, "kind": kind, "body": body}) + "\n"
        handle = self._file()
        try:
            handle.write(line)
            handle.flush()
            os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageError("IoFailure", f"journal append failed: {exc}") from exc

    def records(self, after_seq: int = 0) -> Iterator[dict[str, Any]]:
        """Yield journal records with seq > after_seq, verifying contiguity."""
        if not self.path.exists():
            return
        expected = None
        with open(self.path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                try:
                    record = json.loads(stripped)
                    seq = record["seq"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    raise StorageError("JournalCorrupt",
                                       f"unreadable journal line {line_no}",
                                       seq=line_no) from None
                if expected is not None and seq != expected:
                    raise StorageError("JournalCorrupt",
                                       f"journal seq jumped from {expected - 1} to {seq}",
                                       seq=seq)
                expected = seq + 1
                if seq > after_seq:
                    yield record

    def last_seq(self) -> int:
        last = 0
        for record in self.records():
            last = record["seq"]
        return last

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    # -- checkpoints ------------------------------------------------------

    @property
    def checkpoint_path(self) -> Path:
        return self.data_dir / CHECKPOINT_FILE

    def write_checkpoint(self, seq: int, state: dict[str, Any]) -> dict[str, Any]:
        record = {"seq": seq, "state": state}
        tmp = self.checkpoint_path.with_suffix(".tmp")
        try:
            tmp.write_text(canonical_json(record), encoding="utf-8")
            tmp.replace(self.checkpoint_path)
        except OSError as exc:
            raise StorageError("IoFailure", f"checkpoint write failed: {exc}") from exc
        return record

    def read_checkpoint(self) -> Optional[dict[str, Any]]:
        if not self.checkpoint_path.exists():
            return None
        try:
            return json.loads(self.checkpoint_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageError("JournalCorrupt", f"unreadable checkpoint: {exc}",
                               seq=0) from exc
