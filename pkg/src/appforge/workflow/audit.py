"""Hash-chained, append-only audit log.

Each event is serialized canonically without its own hash; event_hash is
SHA-256 over those bytes, and prev_hash links to the previous event (genesis
is 32 zero bytes). The export format is one canonical JSON line per event,
self-contained enough for offline verification by an independent tool.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from typing import Callable

from ..canonical import canonical_bytes, utc_now

GENESIS = "0" * 64

_FIELDS = (
    "seq",
    "actor",
    "action",
    "app_id",
    "version_no",
    "prev_state",
    "next_state",
    "at",
    "prev_hash",
)


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    actor: str
    action: str
    app_id: str | None
    version_no: int | None
    prev_state: str | None
    next_state: str | None
    at: str
    prev_hash: str
    event_hash: str

    def to_line(self) -> str:
        doc = {f: getattr(self, f) for f in _FIELDS}
        doc["event_hash"] = self.event_hash
        return _canonical_line(doc)


def _canonical_line(doc: dict) -> str:
    return canonical_bytes(doc).decode("utf-8")


def _hash_event(doc: dict) -> str:
    body = {f: doc[f] for f in _FIELDS}
    return hashlib.sha256(canonical_bytes(body)).hexdigest()


class AuditLog:
    """Single global appender.

    Every append produces a store put ("audit", zero-padded seq, {seq, line}).
    Callers that commit their own batch pass it in so the event lands
    atomically with the state change; bare appends go through the persist
    sink, which commits a solo batch.
    """

    def __init__(self, persist: Callable[[list], None] | None = None):
        self._lock = threading.Lock()
        self._events: list[AuditEvent] = []
        self._lines: list[str] = []
        self._persist = persist or (lambda puts: None)

    def __len__(self) -> int:
        return len(self._events)

    @property
    def events(self) -> list[AuditEvent]:
        return list(self._events)

    def lines(self, from_seq: int = 0) -> list[str]:
        return [l for e, l in zip(self._events, self._lines) if e.seq >= from_seq]

    def append(
        self,
        actor: str,
        action: str,
        app_id: str | None = None,
        version_no: int | None = None,
        prev_state: str | None = None,
        next_state: str | None = None,
        batch: list | None = None,
    ) -> AuditEvent:
        with self._lock:
            prev_hash = self._events[-1].event_hash if self._events else GENESIS
            doc = {
                "seq": len(self._events) + 1,
                "actor": actor,
                "action": action,
                "app_id": app_id,
                "version_no": version_no,
                "prev_state": prev_state,
                "next_state": next_state,
                "at": utc_now(),
                "prev_hash": prev_hash,
            }
            doc["event_hash"] = _hash_event(doc)
            event = AuditEvent(**doc)
            line = event.to_line()
            self._events.append(event)
            self._lines.append(line)
            put = ("audit", f"{event.seq:012d}", {"seq": event.seq, "line": line})
            if batch is not None:
                batch.append(put)
            else:
                self._persist([put])
            return event

    def verify(self) -> tuple[bool, int | None]:
        return verify_audit_lines(self._lines)

    @classmethod
    def restore(cls, lines: list[str], persist: Callable[[list], None] | None = None) -> "AuditLog":
        log = cls(persist=persist)
        for line in lines:
            doc = json.loads(line)
            log._events.append(AuditEvent(**doc))
            log._lines.append(line)
        return log


def verify_audit_lines(lines: list[str] | list[bytes]) -> tuple[bool, int | None]:
    """Recompute every hash over a contiguous export from genesis.

    Returns (True, None) when the chain holds, else (False, first_bad_seq).
    A line that cannot be parsed at position i is reported as seq i.
    """
    prev_hash = GENESIS
    for i, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError:
                return False, i
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            return False, i
        if not isinstance(doc, dict) or set(doc) != set(_FIELDS) | {"event_hash"}:
            return False, i
        if doc["seq"] != i:
            return False, i
        if doc["prev_hash"] != prev_hash:
            return False, i
        if _canonical_line(doc) != line:
            return False, i
        if _hash_event(doc) != doc["event_hash"]:
            return False, i
        prev_hash = doc["event_hash"]
    return True, None
