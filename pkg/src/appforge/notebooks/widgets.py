"""Compile a validated app config into a canonical, renderable widget schema.

Pure function: equal configs yield byte-identical serializations (sorted keys
within each control, controls in declared order, no insignificant whitespace).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..canonical import canonical_bytes
from ..errors import InvalidConfig
from .appconfig import AppConfig, validate_app_config

SCHEMA_VERSION = 1


@dataclass
class WidgetSchema:
    app_title: str
    controls: list[dict] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def to_doc(self) -> dict:
        return {
            "app_title": self.app_title,
            "controls": self.controls,
            "schema_version": self.schema_version,
        }

    def to_bytes(self) -> bytes:
        return canonical_bytes(self.to_doc())


def generate_widget_schema(cfg: AppConfig) -> WidgetSchema:
    report = validate_app_config(cfg)
    if not report.passed:
        raise InvalidConfig(f"config has violations: {[v.kind for v in report.violations]}")
    controls = []
    for spec in cfg.inputs:
        control: dict = {"name": spec.name, "widget": spec.widget, "label": spec.label}
        if spec.has_default:
            control["default"] = spec.default
        if spec.widget == "dropdown":
            control["choices"] = list(spec.choices)
        elif spec.widget == "slider":
            control["min"] = spec.min
            control["max"] = spec.max
            control["step"] = spec.step
        elif spec.widget == "file":
            control["accept"] = list(spec.accept)
        controls.append(control)
    return WidgetSchema(app_title=cfg.title, controls=controls)
