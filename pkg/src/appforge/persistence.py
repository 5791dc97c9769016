"""Durable store: atomic write batches over a write-ahead log.

Every mutating platform operation commits exactly one batch; a batch is one
line in the log carrying its own checksum, so recovery replays the longest
valid prefix and a torn or corrupted tail is dropped. State transitions and
their audit events always travel in the same batch, which is what makes a
crash between any two batches audit-consistent.
"""

from __future__ import annotations

import hashlib
import os
import threading
from pathlib import Path

import json

from .canonical import canonical_bytes
from .errors import StorageError


class Store:
    """Dict-of-dicts keyspace with batch commits and optional WAL durability."""

    def __init__(self, wal_path: Path | None = None):
        self._lock = threading.Lock()
        self.spaces: dict[str, dict[str, dict]] = {}
        self.batches_committed = 0
        self._wal_path = Path(wal_path) if wal_path else None
        self._wal_file = None
        if self._wal_path is not None:
            self._wal_path.parent.mkdir(parents=True, exist_ok=True)
            self._wal_file = open(self._wal_path, "ab")

    # --- reads -----------------------------------------------------------

    def get(self, space: str, key: str) -> dict | None:
        doc = self.spaces.get(space, {}).get(key)
        return dict(doc) if doc is not None else None

    def scan(self, space: str) -> dict[str, dict]:
        return {k: dict(v) for k, v in self.spaces.get(space, {}).items()}

    # --- writes ----------------------------------------------------------

    def commit(self, puts: list[tuple[str, str, dict]]) -> int:
        """Apply a batch atomically. puts = [(space, key, doc), ...]."""
        with self._lock:
            batch_no = self.batches_committed + 1
            record = {
                "batch": batch_no,
                "puts": [{"space": s, "key": k, "doc": d} for s, k, d in puts],
            }
            record["checksum"] = _checksum(record)
            if self._wal_file is not None:
                try:
                    self._wal_file.write(canonical_bytes(record) + b"\n")
                    self._wal_file.flush()
                    os.fsync(self._wal_file.fileno())
                except OSError as exc:
                    raise StorageError(f"wal append failed: {exc}") from exc
            for space, key, doc in puts:
                self.spaces.setdefault(space, {})[key] = dict(doc)
            self.batches_committed = batch_no
            return batch_no

    def close(self) -> None:
        if self._wal_file is not None:
            self._wal_file.close()
            self._wal_file = None

    # --- recovery ----------------------------------------------------------

    @classmethod
    def recover(cls, wal_path: Path) -> "Store":
        """Rebuild state from the longest valid WAL prefix, then truncate the
        log to that prefix so later appends continue from a clean point."""
        wal_path = Path(wal_path)
        store = cls.__new__(cls)
        store._lock = threading.Lock()
        store.spaces = {}
        store.batches_committed = 0
        store._wal_path = wal_path
        store._wal_file = None

        good_bytes = 0
        if wal_path.exists():
            raw = wal_path.read_bytes()
            offset = 0
            expected_batch = 1
            while True:
                nl = raw.find(b"\n", offset)
                if nl < 0:
                    break
                line = raw[offset:nl]
                record = _parse_record(line, expected_batch)
                if record is None:
                    break
                for put in record["puts"]:
                    store.spaces.setdefault(put["space"], {})[put["key"]] = put["doc"]
                store.batches_committed = expected_batch
                expected_batch += 1
                offset = nl + 1
                good_bytes = offset
            if good_bytes != len(raw):
                with open(wal_path, "r+b") as f:
                    f.truncate(good_bytes)
        wal_path.parent.mkdir(parents=True, exist_ok=True)
        store._wal_file = open(wal_path, "ab")
        return store


def _checksum(record: dict) -> str:
    body = {k: v for k, v in record.items() if k != "checksum"}
    return hashlib.sha256(canonical_bytes(body)).hexdigest()


def _parse_record(line: bytes, expected_batch: int) -> dict | None:
    try:
        record = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return None
    if not isinstance(record, dict):
        return None
    if record.get("batch") != expected_batch:
        return None
    if record.get("checksum") != _checksum(record):
        return None
    puts = record.get("puts")
    if not isinstance(puts, list):
        return None
    for put in puts:
        if not (isinstance(put, dict) and {"space", "key", "doc"} <= set(put)):
            return None
    return record
