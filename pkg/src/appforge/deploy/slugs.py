"""Slug derivation: stable, URL-safe names under /internal/."""

from __future__ import annotations

import re

from ..errors import EmptyTitle, Unsluggable

MAX_SLUG_LENGTH = 63

_NON_ALNUM_RUN = re.compile(r"[^a-z0-9]+")


def make_slug(title: str, existing: set[str]) -> str:
    if not title.strip():
        raise EmptyTitle("title must be non-empty")
    base = _NON_ALNUM_RUN.sub("-", title.lower()).strip("-")
    if not base:
        raise Unsluggable(f"no alphanumeric characters in {title!r}")
    base = base[:MAX_SLUG_LENGTH].rstrip("-")
    if base not in existing:
        return base
    n = 2
    while True:
        suffix = f"-{n}"
        candidate = base[: MAX_SLUG_LENGTH - len(suffix)].rstrip("-") + suffix
        if candidate not in existing:
            return candidate
        n += 1
