"""Dependency manifest grammar.

Line-oriented: blank lines and comment lines (first non-space char "#") are
skipped; every other line is `name` or `name OP version`. One constraint per
line, no extras, markers, or URLs — anything that cannot be checked against
the registry is a parse error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import DuplicatePackage, EmptyName, IllegalCharacter, ParseError, UnsupportedEcosystem
from .names import normalize_package_name
from .versions import Constraint, parse_version

SUPPORTED_ECOSYSTEMS = ("pypi", "cran")

_LINE_RE = re.compile(
    r"^\s*(?P<name>[A-Za-z0-9._-]+)\s*"
    r"(?:(?P<op>==|>=|<=|~=|>|<)\s*(?P<version>\d+(?:\.\d+)*))?\s*$"
)


@dataclass(frozen=True)
class ManifestEntry:
    raw_name: str
    normalized_name: str
    constraint: Constraint | None = None


@dataclass
class DependencyManifest:
    ecosystem: str
    entries: list[ManifestEntry] = field(default_factory=list)
    source_text: bytes = b""


def parse_manifest(text: bytes, ecosystem: str) -> DependencyManifest:
    if ecosystem not in SUPPORTED_ECOSYSTEMS:
        raise UnsupportedEcosystem(ecosystem)
    try:
        decoded = text.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(0, f"manifest is not UTF-8: {exc}") from None

    entries: list[ManifestEntry] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(decoded.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise ParseError(line_no, f"expected `name` or `name OP version`, got {stripped!r}")
        raw_name = m.group("name")
        try:
            name = normalize_package_name(raw_name)
        except (EmptyName, IllegalCharacter) as exc:
            raise ParseError(line_no, str(exc)) from None
        if name in seen:
            raise DuplicatePackage(name, line_no)
        seen[name] = line_no
        constraint = None
        if m.group("op"):
            constraint = Constraint(m.group("op"), parse_version(m.group("version")))
        entries.append(ManifestEntry(raw_name=raw_name, normalized_name=name, constraint=constraint))
    return DependencyManifest(ecosystem=ecosystem, entries=entries, source_text=text)


def serialize_manifest(manifest: DependencyManifest) -> bytes:
    lines = []
    for entry in manifest.entries:
        if entry.constraint is None:
            lines.append(entry.normalized_name)
        else:
            lines.append(f"{entry.normalized_name}{entry.constraint}")
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
