"""Canonical serialization helpers.

Every document that gets hashed, exported, or golden-tested goes through
canonical_json: sorted keys, no insignificant whitespace, UTF-8, so equal
inputs always yield byte-identical output.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(doc) -> bytes:
    return canonical_json(doc).encode("utf-8")


def utc_now() -> str:
    return format_utc(datetime.now(timezone.utc))


def format_utc(dt: datetime) -> str:
    """Fixed-width UTC timestamp: microseconds always present, Z suffix."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")
