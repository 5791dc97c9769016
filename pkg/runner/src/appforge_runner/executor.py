"""Execute a bound notebook's code cells under the policy guards.

Cells run in order in one fresh namespace; captured stdout and the value of a
cell's trailing expression become output artifacts. The wall clock is
enforced with an interval timer, so even a busy loop lands as a timeout.
"""

from __future__ import annotations

import ast
import io
import json
import signal
import time
import traceback
from contextlib import redirect_stdout

from .guards import PolicyImport, PolicyNetwork, import_allowlist, network_allowlist
from .wire import RunnerOutput, RunnerRequest, RunnerResult, WireError


class Deadline(Exception):
    pass


def _parse_cells(notebook: bytes) -> list[tuple[int, str]]:
    try:
        doc = json.loads(notebook.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireError(f"notebook is not a JSON document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("nbformat") != 4:
        raise WireError("notebook is not interchange format v4")
    cells = []
    for index, cell in enumerate(doc.get("cells", [])):
        if cell.get("cell_type") != "code":
            continue
        source = cell.get("source", "")
        if isinstance(source, list):
            source = "".join(source)
        cells.append((index, source))
    return cells


def _run_cell(source: str, namespace: dict, filename: str) -> tuple[str, object]:
    """Execute one cell; returns (captured stdout, trailing expression value)."""
    tree = ast.parse(source, filename=filename)
    trailing = None
    if tree.body and isinstance(tree.body[-1], ast.Expr):
        trailing = ast.Expression(tree.body[-1].value)
        tree.body = tree.body[:-1]
    buffer = io.StringIO()
    value = None
    with redirect_stdout(buffer):
        if tree.body:
            exec(compile(tree, filename, "exec"), namespace)
        if trailing is not None:
            value = eval(compile(trailing, filename, "eval"), namespace)
    return buffer.getvalue(), value


def _artifacts_for(index: int, stdout: str, value: object) -> list[RunnerOutput]:
    artifacts = []
    if stdout:
        artifacts.append(RunnerOutput(index, "text", stdout.encode("utf-8")))
    if value is not None:
        html = getattr(value, "_repr_html_", None)
        if callable(html):
            artifacts.append(RunnerOutput(index, "html", str(html()).encode("utf-8")))
        else:
            artifacts.append(RunnerOutput(index, "text", repr(value).encode("utf-8")))
    return artifacts


def execute(request: RunnerRequest) -> RunnerResult:
    started = time.monotonic()

    def elapsed() -> float:
        return round(time.monotonic() - started, 6)

    try:
        cells = _parse_cells(request.notebook)
    except WireError as exc:
        return RunnerResult(request.request_id, "error", log=str(exc), wall_seconds=elapsed())

    def on_alarm(signum, frame):
        raise Deadline()

    previous_handler = signal.signal(signal.SIGALRM, on_alarm)
    signal.setitimer(signal.ITIMER_REAL, request.max_wall_seconds)

    namespace: dict = {"__name__": "__main__"}
    outputs: list[RunnerOutput] = []
    try:
        with import_allowlist(request.manifest), network_allowlist(request.network_allowlist):
            for index, source in cells:
                stdout, value = _run_cell(source, namespace, filename=f"<cell {index}>")
                outputs.extend(_artifacts_for(index, stdout, value))
        return RunnerResult(
            request.request_id, "success", outputs=outputs,
            log=f"executed {len(cells)} code cells", wall_seconds=elapsed(),
        )
    except PolicyImport as exc:
        return RunnerResult(
            request.request_id, "policy_violation",
            violations=[{"kind": "import", "detail": str(exc)}],
            log=str(exc), wall_seconds=elapsed(),
        )
    except PolicyNetwork as exc:
        return RunnerResult(
            request.request_id, "policy_violation",
            violations=[{"kind": "network", "detail": str(exc)}],
            log=str(exc), wall_seconds=elapsed(),
        )
    except Deadline:
        return RunnerResult(
            request.request_id, "timeout",
            log=f"execution exceeded max_wall_seconds={request.max_wall_seconds}",
            wall_seconds=elapsed(),
        )
    except BaseException:
        return RunnerResult(
            request.request_id, "error",
            log=traceback.format_exc(limit=20), wall_seconds=elapsed(),
        )
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous_handler)
