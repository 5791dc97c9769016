"""Bind user-supplied parameter values into an executable notebook.

A single generated assignment cell is inserted right after the config cell;
the author's cells are never rewritten, so reviewers and the audit trail see
their code verbatim.
"""

from __future__ import annotations

from dataclasses import replace
from numbers import Real

from ..errors import MissingRequired, UnknownParameter, ValueOutOfDomain
from .appconfig import AppConfig, InputSpec, _config_cell_index
from .document import Cell, NotebookDocument

PARAMETER_CELL_TAG = "parameters"


def _check_value(spec: InputSpec, value) -> None:
    if spec.widget == "dropdown":
        if value not in spec.choices:
            raise ValueOutOfDomain(spec.name, f"{value!r} is not one of the declared choices")
    elif spec.widget == "slider":
        if not (isinstance(value, Real) and not isinstance(value, bool)):
            raise ValueOutOfDomain(spec.name, "slider value must be a number")
        if not (spec.min <= value <= spec.max):
            raise ValueOutOfDomain(spec.name, f"{value!r} outside [{spec.min}, {spec.max}]")
    elif spec.widget == "text":
        if not isinstance(value, str):
            raise ValueOutOfDomain(spec.name, "text value must be a string")
    elif spec.widget == "file":
        if not isinstance(value, str):
            raise ValueOutOfDomain(spec.name, "file value must be an uploaded-artifact reference")


def _literal(value) -> str:
    if isinstance(value, (str, bool, int, float)) or value is None:
        return repr(value)
    raise ValueOutOfDomain("?", f"cannot render {type(value).__name__} as a parameter literal")


def bind_parameters(nb: NotebookDocument, values: dict, cfg: AppConfig) -> NotebookDocument:
    declared = {spec.name for spec in cfg.inputs}
    for key in values:
        if key not in declared:
            raise UnknownParameter(key)

    assignments = []
    for spec in cfg.inputs:
        if spec.name in values:
            value = values[spec.name]
        elif spec.has_default:
            value = spec.default
        else:
            raise MissingRequired(spec.name)
        _check_value(spec, value)
        assignments.append(f"{spec.name} = {_literal(value)}")

    cell = Cell(kind="code", source="\n".join(assignments), tags=(PARAMETER_CELL_TAG,))
    idx = _config_cell_index(nb)
    insert_at = 0 if idx is None else idx + 1
    cells = list(nb.cells)
    cells.insert(insert_at, cell)
    return replace(nb, cells=cells)
