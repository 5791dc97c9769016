"""App-config header: the YAML block in the notebook's first raw cell.

extract_app_config is strict about structure (unknown keys, unknown widget
kinds, wrong types are SchemaErrors); validate_app_config reports semantic
invariant violations without raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from numbers import Real

import yaml

from ..errors import NoConfigCell, SchemaError, YamlError
from ..reports import ValidationReport, Violation
from .document import NotebookDocument

WIDGET_KINDS = ("text", "dropdown", "slider", "file")

CONFIG_TAG = "app-config"

_NAME_RE = re.compile(r"^[a-z_][a-z0-9_]*$")

_INPUT_KEYS = {"name", "widget", "label", "default", "choices", "min", "max", "step", "accept"}
_TOP_KEYS = {"title", "description", "inputs"}

_WIDGET_ONLY_KEYS = {
    "choices": "dropdown",
    "min": "slider",
    "max": "slider",
    "step": "slider",
    "accept": "file",
}


@dataclass(frozen=True)
class InputSpec:
    name: str
    widget: str
    label: str
    default: object | None = None
    has_default: bool = False
    choices: tuple[str, ...] = ()
    min: float | None = None
    max: float | None = None
    step: float | None = None
    accept: tuple[str, ...] = ()


@dataclass
class AppConfig:
    title: str
    description: str | None = None
    inputs: list[InputSpec] = field(default_factory=list)


def _config_cell_index(nb: NotebookDocument) -> int | None:
    if not nb.cells:
        return None
    first = nb.cells[0]
    if first.kind != "raw":
        return None
    if CONFIG_TAG in first.tags:
        return 0
    if first.source.lstrip("﻿").split("\n", 1)[0].strip() == "---":
        return 0
    return None


def _yaml_body(source: str) -> str:
    lines = source.split("\n")
    if lines and lines[0].strip() == "---":
        lines = lines[1:]
        for i, line in enumerate(lines):
            if line.strip() == "---":
                lines = lines[:i]
                break
    return "\n".join(lines)


def _is_number(v) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool)


def _parse_input(i: int, raw: dict) -> InputSpec:
    path = f"inputs[{i}]"
    if not isinstance(raw, dict):
        raise SchemaError(path, "input is not a mapping")
    unknown = set(raw) - _INPUT_KEYS
    if unknown:
        raise SchemaError(path, f"unknown keys: {sorted(unknown)}")
    for key in ("name", "widget"):
        if key not in raw:
            raise SchemaError(f"{path}.{key}", "required key missing")
    name, widget = raw["name"], raw["widget"]
    if not isinstance(name, str):
        raise SchemaError(f"{path}.name", "must be a string")
    if widget not in WIDGET_KINDS:
        raise SchemaError(f"{path}.widget", f"unknown widget kind {widget!r}")
    label = raw.get("label", name)
    if not isinstance(label, str):
        raise SchemaError(f"{path}.label", "must be a string")
    for key, owner in _WIDGET_ONLY_KEYS.items():
        if key in raw and widget != owner:
            raise SchemaError(f"{path}.{key}", f"only valid for {owner} widgets")

    choices: tuple[str, ...] = ()
    if "choices" in raw:
        if not (isinstance(raw["choices"], list) and all(isinstance(c, str) for c in raw["choices"])):
            raise SchemaError(f"{path}.choices", "must be a list of strings")
        choices = tuple(raw["choices"])
    bounds = {}
    for key in ("min", "max", "step"):
        if key in raw:
            if not _is_number(raw[key]):
                raise SchemaError(f"{path}.{key}", "must be a number")
            bounds[key] = raw[key]
    accept: tuple[str, ...] = ()
    if "accept" in raw:
        if not (isinstance(raw["accept"], list) and all(isinstance(a, str) for a in raw["accept"])):
            raise SchemaError(f"{path}.accept", "must be a list of strings")
        accept = tuple(raw["accept"])

    return InputSpec(
        name=name,
        widget=widget,
        label=label,
        default=raw.get("default"),
        has_default="default" in raw,
        choices=choices,
        min=bounds.get("min"),
        max=bounds.get("max"),
        step=bounds.get("step"),
        accept=accept,
    )


def extract_app_config(nb: NotebookDocument) -> AppConfig:
    idx = _config_cell_index(nb)
    if idx is None:
        raise NoConfigCell("no app-config cell: first cell must be raw with an app-config tag or --- fence")
    try:
        doc = yaml.safe_load(_yaml_body(nb.cells[idx].source))
    except yaml.YAMLError as exc:
        line = getattr(getattr(exc, "problem_mark", None), "line", -1)
        raise YamlError(line + 1, str(getattr(exc, "problem", exc))) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise SchemaError("", "config is not a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError("", f"unknown keys: {sorted(unknown)}")
    if "title" not in doc:
        raise SchemaError("title", "required key missing")
    if not isinstance(doc["title"], str):
        raise SchemaError("title", "must be a string")
    description = doc.get("description")
    if description is not None and not isinstance(description, str):
        raise SchemaError("description", "must be a string")
    raw_inputs = doc.get("inputs", [])
    if raw_inputs is None:
        raw_inputs = []
    if not isinstance(raw_inputs, list):
        raise SchemaError("inputs", "must be a list")
    inputs = [_parse_input(i, raw) for i, raw in enumerate(raw_inputs)]
    return AppConfig(title=doc["title"], description=description, inputs=inputs)


def validate_app_config(cfg: AppConfig) -> ValidationReport:
    violations: list[Violation] = []
    if not cfg.title.strip():
        violations.append(Violation("title", "empty_title", "title must be non-empty"))
    seen: set[str] = set()
    for spec in cfg.inputs:
        if spec.name in seen:
            violations.append(Violation(spec.name, "duplicate_input", "input name declared twice"))
        seen.add(spec.name)
        if not _NAME_RE.match(spec.name):
            violations.append(
                Violation(spec.name, "invalid_input_name", "name must match [a-z_][a-z0-9_]*")
            )
        if spec.widget == "dropdown":
            if not spec.choices:
                violations.append(Violation(spec.name, "empty_choices", "dropdown needs at least one choice"))
            elif spec.has_default and spec.default not in spec.choices:
                violations.append(
                    Violation(spec.name, "default_not_in_choices", f"default {spec.default!r} not among choices")
                )
        elif spec.widget == "slider":
            if spec.min is None or spec.max is None or spec.step is None:
                violations.append(Violation(spec.name, "missing_bounds", "slider needs min, max and step"))
                continue
            if not spec.min < spec.max:
                violations.append(Violation(spec.name, "invalid_slider_range", "min must be < max"))
            if not spec.step > 0:
                violations.append(Violation(spec.name, "invalid_slider_step", "step must be > 0"))
            if spec.has_default:
                if not _is_number(spec.default):
                    violations.append(
                        Violation(spec.name, "slider_default_out_of_range", "default must be a number")
                    )
                elif not (spec.min <= spec.default <= spec.max):
                    violations.append(
                        Violation(spec.name, "slider_default_out_of_range", "default outside [min, max]")
                    )
        elif spec.widget == "file":
            if spec.has_default:
                violations.append(Violation(spec.name, "file_widget_default", "file inputs cannot have defaults"))
    return ValidationReport(violations=violations)
