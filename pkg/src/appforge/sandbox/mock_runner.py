"""Deterministic test-double runner.

Never executes author code. Emits one text output per code cell (the
parameter cell is consumed for its bindings, not echoed), and honors magic
directives so failure paths are drivable from fixtures:

    #!sandbox:network  -> policy_violation (kind network)
    #!sandbox:sleep    -> timeout
    #!sandbox:error    -> error
"""

from __future__ import annotations

import ast

from ..notebooks import parse_notebook
from ..notebooks.binding import PARAMETER_CELL_TAG
from .wire import ExecutionRequest, WireOutput, WireResult


def _bindings_from_cell(source: str) -> dict[str, object]:
    bindings: dict[str, object] = {}
    for line in source.splitlines():
        if " = " not in line:
            continue
        name, _, literal = line.partition(" = ")
        try:
            bindings[name.strip()] = ast.literal_eval(literal.strip())
        except (ValueError, SyntaxError):
            bindings[name.strip()] = literal.strip()
    return bindings


def mock_run(request: ExecutionRequest) -> WireResult:
    nb = parse_notebook(request.notebook)
    bindings: dict[str, object] = {}
    code_cells: list[tuple[int, str]] = []
    for idx, cell in enumerate(nb.cells):
        if cell.kind != "code":
            continue
        if PARAMETER_CELL_TAG in cell.tags:
            bindings.update(_bindings_from_cell(cell.source))
        else:
            code_cells.append((idx, cell.source))

    for idx, source in code_cells:
        if "#!sandbox:network" in source:
            return WireResult(
                request_id=request.request_id,
                status="policy_violation",
                outputs=(),
                violations=({"kind": "network", "detail": f"external fetch attempted in cell {idx}"},),
                log=f"cell {idx} attempted a network connection outside the allowlist",
                wall_seconds=0.0,
            )
        if "#!sandbox:sleep" in source:
            return WireResult(
                request_id=request.request_id,
                status="timeout",
                outputs=(),
                violations=(),
                log=f"cell {idx} exceeded max_wall_seconds={request.policy.max_wall_seconds}",
                wall_seconds=float(request.policy.max_wall_seconds),
            )
        if "#!sandbox:error" in source:
            return WireResult(
                request_id=request.request_id,
                status="error",
                outputs=(),
                violations=(),
                log=f"cell {idx} raised an exception",
                wall_seconds=0.0,
            )

    rendered = ", ".join(f"{k}={bindings[k]}" for k in sorted(bindings)) or "(no parameters)"
    outputs = tuple(
        WireOutput(source_cell_index=idx, mime_kind="text", payload=f"cell {idx}: {rendered}".encode("utf-8"))
        for idx, _ in code_cells
    )
    return WireResult(
        request_id=request.request_id,
        status="success",
        outputs=outputs,
        violations=(),
        log=f"executed {len(code_cells)} code cells",
        wall_seconds=0.0,
    )
