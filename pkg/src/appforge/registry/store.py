"""Curated package registry: one approval decision per (ecosystem, name).

Decisions are append-only in effect: a rejected entry can be re-requested,
which supersedes the old row (kept for audit) with a fresh pending one.
Writes are serialized behind a single lock; reads see consistent snapshots.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from typing import Callable, Iterable

from ..canonical import utc_now
from ..errors import AlreadyApproved, AlreadyPending, Forbidden, NotFound, NotPending, UnsupportedEcosystem
from .manifest import SUPPORTED_ECOSYSTEMS
from .names import normalize_package_name
from .versions import parse_constraint_expr

STATUSES = ("approved", "pending", "rejected")


@dataclass(frozen=True)
class PackageRegistryEntry:
    ecosystem: str
    normalized_name: str
    allowed_versions: str = "any"
    status: str = "pending"
    requested_by: str | None = None
    decided_by: str | None = None
    note: str = ""
    created_at: str = ""
    decided_at: str | None = None

    def to_doc(self) -> dict:
        return {
            "ecosystem": self.ecosystem,
            "normalized_name": self.normalized_name,
            "allowed_versions": self.allowed_versions,
            "status": self.status,
            "requested_by": self.requested_by,
            "decided_by": self.decided_by,
            "note": self.note,
            "created_at": self.created_at,
            "decided_at": self.decided_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PackageRegistryEntry":
        return cls(**doc)


# Called with (store puts, audit info or None) on every registry change; the
# platform implementation appends the audit event to the puts and commits the
# whole changeset as one atomic batch.
Journal = Callable[[list, dict | None], None]


class PackageRegistry:
    def __init__(self, journal: Journal | None = None):
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], PackageRegistryEntry] = {}
        self._history: list[PackageRegistryEntry] = []
        self._journal = journal or (lambda puts, audit: None)

    def _puts_for(self, entry: PackageRegistryEntry, superseded: PackageRegistryEntry | None = None) -> list:
        key = f"{entry.ecosystem}:{entry.normalized_name}"
        puts = [("registry", key, entry.to_doc())]
        if superseded is not None:
            puts.append(("registry_history", f"{key}:{len(self._history)}", superseded.to_doc()))
        return puts

    # --- reads ---------------------------------------------------------------

    def snapshot(self) -> list[PackageRegistryEntry]:
        with self._lock:
            return list(self._entries.values())

    def get(self, ecosystem: str, name: str) -> PackageRegistryEntry | None:
        return self._entries.get((ecosystem, normalize_package_name(name)))

    def history(self) -> list[PackageRegistryEntry]:
        with self._lock:
            return list(self._history)

    # --- writes --------------------------------------------------------------

    def seed(self, entry: PackageRegistryEntry) -> None:
        """Install an entry directly (imports and platform bootstrap)."""
        with self._lock:
            key = (entry.ecosystem, entry.normalized_name)
            old = self._entries.get(key)
            if old is not None:
                self._history.append(old)
            self._entries[key] = entry
            self._journal(self._puts_for(entry, superseded=old), None)

    def request_approval(self, ecosystem: str, raw_name: str, requester: str, note: str = "") -> PackageRegistryEntry:
        if ecosystem not in SUPPORTED_ECOSYSTEMS:
            raise UnsupportedEcosystem(ecosystem)
        name = normalize_package_name(raw_name)
        with self._lock:
            key = (ecosystem, name)
            superseded = None
            existing = self._entries.get(key)
            if existing is not None:
                if existing.status == "approved":
                    raise AlreadyApproved(f"{name} is already approved")
                if existing.status == "pending":
                    raise AlreadyPending(f"{name} already has a pending request")
                self._history.append(existing)  # rejected: superseded but kept
                superseded = existing
            entry = PackageRegistryEntry(
                ecosystem=ecosystem,
                normalized_name=name,
                status="pending",
                requested_by=requester,
                note=note,
                created_at=utc_now(),
            )
            self._entries[key] = entry
            self._journal(
                self._puts_for(entry, superseded=superseded),
                {"action": "package_request", "actor": requester},
            )
        return entry

    def decide_approval(
        self,
        ecosystem: str,
        normalized_name: str,
        decision: str,
        admin: str,
        allowed_versions: str = "any",
        admin_roles: Iterable[str] = ("admin",),
    ) -> PackageRegistryEntry:
        if decision not in ("approve", "reject"):
            raise NotFound(f"unknown decision {decision!r}")
        if "admin" not in admin_roles:
            raise Forbidden(f"{admin} lacks the admin role")
        parse_constraint_expr(allowed_versions)  # reject bad expressions up front
        with self._lock:
            key = (ecosystem, normalized_name)
            existing = self._entries.get(key)
            if existing is None or existing.status != "pending":
                raise NotPending(f"{normalized_name} has no pending request")
            if existing.requested_by == admin:
                raise Forbidden("requester may not decide their own request")
            entry = replace(
                existing,
                status="approved" if decision == "approve" else "rejected",
                decided_by=admin,
                decided_at=utc_now(),
                allowed_versions=allowed_versions if decision == "approve" else existing.allowed_versions,
            )
            self._entries[key] = entry
            self._journal(
                self._puts_for(entry),
                {"action": "package_approve" if decision == "approve" else "package_reject", "actor": admin},
            )
        return entry


# --- export / import ----------------------------------------------------------

_TSV_FIELDS = ("ecosystem", "normalized_name", "status", "allowed_versions", "decided_by", "decided_at")


def export_registry_tsv(entries: Iterable[PackageRegistryEntry]) -> str:
    lines = []
    for e in sorted(entries, key=lambda e: (e.ecosystem, e.normalized_name)):
        fields = (e.ecosystem, e.normalized_name, e.status, e.allowed_versions, e.decided_by or "", e.decided_at or "")
        lines.append("\t".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def import_registry_tsv(text: str) -> list[PackageRegistryEntry]:
    entries = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(_TSV_FIELDS):
            raise ValueError(f"line {line_no}: expected {len(_TSV_FIELDS)} tab-separated fields")
        ecosystem, name, status, allowed, decided_by, decided_at = fields
        if status not in STATUSES:
            raise ValueError(f"line {line_no}: bad status {status!r}")
        entries.append(
            PackageRegistryEntry(
                ecosystem=ecosystem,
                normalized_name=normalize_package_name(name),
                status=status,
                allowed_versions=allowed or "any",
                decided_by=decided_by or None,
                decided_at=decided_at or None,
                created_at=utc_now(),
            )
        )
    return entries
