"""Shared fixture builders: the two scenario notebooks and friends."""

from __future__ import annotations

import json

MONTHS = [
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
]

DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]


def build_notebook(config_yaml: str | None, code_cells: list[str], extra_cells: list[dict] | None = None) -> bytes:
    cells = []
    if config_yaml is not None:
        cells.append({"cell_type": "raw", "metadata": {"tags": ["app-config"]}, "source": config_yaml})
    for source in code_cells:
        cells.append({"cell_type": "code", "metadata": {}, "source": source, "outputs": [], "execution_count": None})
    cells.extend(extra_cells or [])
    doc = {"cells": cells, "metadata": {}, "nbformat": 4, "nbformat_minor": 5}
    return json.dumps(doc).encode("utf-8")


BINITA_CONFIG = (
    "---\n"
    "title: Spreadsheets Generator\n"
    "description: Generates county spreadsheets from internal data\n"
    "inputs:\n"
    "  - name: month\n"
    "    widget: dropdown\n"
    "    label: Month\n"
    "    default: January\n"
    f"    choices: {json.dumps(MONTHS)}\n"
    "  - name: county_name\n"
    "    widget: text\n"
    "    label: County Name\n"
    "    default: Sacramento\n"
    "---\n"
)

SIRAK_CONFIG_V1 = (
    "---\n"
    "title: Text Analysis Tool\n"
    "inputs:\n"
    "  - name: day\n"
    "    widget: text\n"
    "    label: Day\n"
    "    default: Monday\n"
    "---\n"
)

SIRAK_CONFIG_V2 = (
    "---\n"
    "title: Text Analysis Tool\n"
    "inputs:\n"
    "  - name: day\n"
    "    widget: dropdown\n"
    "    label: Day of Week\n"
    "    default: Monday\n"
    f"    choices: {json.dumps(DAYS)}\n"
    "---\n"
)

EMPTY_CONFIG = "---\ntitle: Empty App\n---\n"


def binita_notebook(chart_title: str = "Summary") -> bytes:
    return build_notebook(
        BINITA_CONFIG,
        [
            f"rows = [month, county_name]\nprint('{chart_title}:', rows)",
            "print('spreadsheet written')",
        ],
    )


def sirak_notebook_v1() -> bytes:
    return build_notebook(SIRAK_CONFIG_V1, ["print('analysis for', day)"])


def sirak_notebook_v2() -> bytes:
    return build_notebook(SIRAK_CONFIG_V2, ["print('analysis for', day)"])


def empty_config_notebook() -> bytes:
    return build_notebook(EMPTY_CONFIG, ["print('hello')"])


BINITA_MANIFEST = b"pandas\nnumpy\ngeopandas\nspacy\n"
BINITA_MANIFEST_OK = b"pandas\nnumpy\ngeopandas\n"
SIRAK_MANIFEST = b"pandas\nspacy\n"
