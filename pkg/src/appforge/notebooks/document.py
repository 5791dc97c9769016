"""Notebook interchange format, the v4 subset we read.

Only cell_type, source, and metadata tags are interpreted; everything else in
the file is ignored. Serialization is canonical so bound notebooks are
byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..canonical import canonical_bytes
from ..errors import MalformedDocument, UnsupportedVersion

CELL_KINDS = ("code", "markdown", "raw")


@dataclass(frozen=True)
class Cell:
    kind: str
    source: str
    tags: tuple[str, ...] = ()


@dataclass
class NotebookDocument:
    format_version: tuple[int, int]
    cells: list[Cell] = field(default_factory=list)


def parse_notebook(raw: bytes) -> NotebookDocument:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"not a UTF-8 JSON document: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedDocument("top level is not an object")
    major = doc.get("nbformat")
    if not isinstance(major, int):
        raise MalformedDocument("missing nbformat")
    if major != 4:
        raise UnsupportedVersion(f"nbformat {major} not supported, need 4.x")
    minor = doc.get("nbformat_minor", 0)
    if not isinstance(minor, int):
        raise MalformedDocument("nbformat_minor is not an integer")
    raw_cells = doc.get("cells")
    if not isinstance(raw_cells, list):
        raise MalformedDocument("missing cells list")

    cells = []
    for i, rc in enumerate(raw_cells):
        if not isinstance(rc, dict):
            raise MalformedDocument(f"cell {i} is not an object")
        kind = rc.get("cell_type")
        if kind not in CELL_KINDS:
            raise MalformedDocument(f"cell {i} has unknown cell_type {kind!r}")
        source = rc.get("source", "")
        if isinstance(source, list):
            if not all(isinstance(s, str) for s in source):
                raise MalformedDocument(f"cell {i} source lines are not all strings")
            source = "".join(source)
        elif not isinstance(source, str):
            raise MalformedDocument(f"cell {i} source is neither string nor list")
        tags = rc.get("metadata", {}).get("tags", []) if isinstance(rc.get("metadata"), dict) else []
        if not (isinstance(tags, list) and all(isinstance(t, str) for t in tags)):
            raise MalformedDocument(f"cell {i} tags are not a list of strings")
        cells.append(Cell(kind=kind, source=source, tags=tuple(tags)))
    return NotebookDocument(format_version=(major, minor), cells=cells)


def serialize_notebook(nb: NotebookDocument) -> bytes:
    doc = {
        "cells": [
            {
                "cell_type": c.kind,
                "metadata": {"tags": list(c.tags)} if c.tags else {},
                "source": c.source,
            }
            for c in nb.cells
        ],
        "metadata": {},
        "nbformat": nb.format_version[0],
        "nbformat_minor": nb.format_version[1],
    }
    return canonical_bytes(doc)
