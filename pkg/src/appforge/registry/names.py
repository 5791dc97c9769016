"""Package name normalization.

"-", "_" and "." are treated as the same separator so lookalike spellings
cannot bypass the registry; runs collapse to a single "-" and leading or
trailing separators are dropped.
"""

from __future__ import annotations

import re

from ..errors import EmptyName, IllegalCharacter

_LEGAL = re.compile(r"^[A-Za-z0-9._-]*$")
_SEPARATOR_RUN = re.compile(r"[-_.]+")


def normalize_package_name(raw: str) -> str:
    trimmed = raw.strip()
    if not trimmed:
        raise EmptyName("package name is empty")
    if not _LEGAL.match(trimmed):
        bad = next(c for c in trimmed if not re.match(r"[A-Za-z0-9._-]", c))
        raise IllegalCharacter(raw, bad)
    name = _SEPARATOR_RUN.sub("-", trimmed.lower()).strip("-")
    if not name:
        raise EmptyName(f"nothing left of {raw!r} after normalization")
    return name
