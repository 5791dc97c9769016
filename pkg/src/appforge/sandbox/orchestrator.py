"""Build execution requests, dispatch them to a runner, enforce policy.

The runner enforces policy in-process and self-reports violations; the
orchestrator owns the wall-clock backstop (2 s of grace past the policy
limit, then the run is a timeout) and treats an undeclared runner exit as an
error result rather than an exception.
"""

from __future__ import annotations

import io
import subprocess
import threading
import time
import uuid

import httpx
import json

from ..errors import BuildInProgress, ProtocolError, RunnerUnavailable, WrongState
from ..notebooks import bind_parameters, extract_app_config, parse_notebook, serialize_notebook
from ..notebooks.appconfig import AppConfig
from ..registry import parse_manifest
from ..workflow.service import AppVersion, WorkflowService
from ..workflow.states import AT_LEAST_VALIDATED, LifecycleState
from .mock_runner import mock_run
from .policy import PolicyOverride, SandboxPolicy, merge_policy
from .wire import (
    ExecutionRequest,
    ExecutionResult,
    OutputArtifact,
    WireResult,
    parse_result_doc,
    read_framed,
    write_framed,
)

BACKSTOP_GRACE_SECONDS = 2.0

INLINE_PAYLOAD_LIMIT = 64 * 1024

MOCK_RUNNER = {"kind": "mock"}


def sample_values(cfg: AppConfig) -> dict:
    """Placeholder bindings for build checks when an input has no default."""
    values = {}
    for spec in cfg.inputs:
        if spec.has_default:
            continue
        if spec.widget == "dropdown":
            values[spec.name] = spec.choices[0]
        elif spec.widget == "slider":
            values[spec.name] = spec.min
        else:
            values[spec.name] = ""
    return values


class Orchestrator:
    def __init__(self, workflow: WorkflowService, default_policy: SandboxPolicy | None = None,
                 default_runner: dict | None = None):
        self.workflow = workflow
        self.default_policy = default_policy or SandboxPolicy()
        self.default_runner = default_runner or MOCK_RUNNER
        self.overrides: dict[str, PolicyOverride] = {}
        self._builds_in_flight: set[str] = set()
        self._flight_lock = threading.Lock()

    # --- request construction ---------------------------------------------

    def build_execution_request(self, version: AppVersion, params: dict, purpose: str) -> ExecutionRequest:
        if version.state not in AT_LEAST_VALIDATED and version.state is not LifecycleState.SANDBOX_RUNNING:
            raise WrongState(f"version is {version.state.value}; it has not passed validation")
        notebook = self.workflow.content.get(version.notebook_ref)
        manifest_bytes = self.workflow.content.get(version.manifest_ref)
        app = self.workflow.get_app(version.app_id)
        manifest = parse_manifest(manifest_bytes, app.ecosystem)
        nb = parse_notebook(notebook)
        cfg = extract_app_config(nb)
        bound = bind_parameters(nb, params, cfg)
        policy = merge_policy(self.default_policy, self.overrides.get(version.app_id))
        return ExecutionRequest(
            request_id=uuid.uuid4().hex,
            app_id=version.app_id,
            version_no=version.version_no,
            notebook=serialize_notebook(bound),
            manifest=tuple(e.normalized_name for e in manifest.entries),
            policy=policy,
            purpose=purpose,
        )

    # --- dispatch -----------------------------------------------------------

    def dispatch(self, request: ExecutionRequest, runner: dict | None = None) -> ExecutionResult:
        runner = runner or self.default_runner
        version = self.workflow.get_version(request.app_id, request.version_no)
        build_check = request.purpose == "build_check"
        if build_check:
            with self._flight_lock:
                if version.ref in self._builds_in_flight:
                    raise BuildInProgress(f"a build check for {version.ref} is already running")
                self._builds_in_flight.add(version.ref)
        try:
            if build_check:
                self.workflow.transition(version, "sandbox_start", actor="system")
            wire = self._run(request, runner)
            result = self._ingest(request, wire)
            if build_check:
                event = "sandbox_pass" if result.status == "success" else "sandbox_fail"
                self.workflow.transition(version, event, actor="system")
            return result
        finally:
            if build_check:
                with self._flight_lock:
                    self._builds_in_flight.discard(version.ref)

    def _run(self, request: ExecutionRequest, runner: dict) -> WireResult:
        kind = runner.get("kind")
        if kind == "mock":
            return mock_run(request)
        if kind == "process":
            return self._run_process(request, runner["argv"])
        if kind == "http":
            return self._run_http(request, runner["url"])
        raise RunnerUnavailable(f"unknown runner kind {kind!r}")

    def _run_process(self, request: ExecutionRequest, argv: list[str]) -> WireResult:
        deadline = request.policy.max_wall_seconds + BACKSTOP_GRACE_SECONDS
        frame = io.BytesIO()
        write_framed(frame, request.to_bytes())
        started = time.monotonic()
        try:
            proc = subprocess.run(
                argv, input=frame.getvalue(), capture_output=True, timeout=deadline
            )
        except FileNotFoundError as exc:
            raise RunnerUnavailable(f"cannot spawn runner: {exc}") from exc
        except subprocess.TimeoutExpired:
            return self._timeout_result(request, time.monotonic() - started)
        elapsed = time.monotonic() - started
        if proc.returncode != 0 or not proc.stdout:
            log = proc.stderr.decode("utf-8", "replace")[-4000:]
            return self._error_result(request, f"runner exited with {proc.returncode}: {log}", elapsed)
        try:
            payload = read_framed(io.BytesIO(proc.stdout))
            return parse_result_doc(json.loads(payload.decode("utf-8")))
        except (ProtocolError, ValueError, UnicodeDecodeError) as exc:
            return self._error_result(request, f"malformed runner result: {exc}", elapsed)

    def _run_http(self, request: ExecutionRequest, url: str) -> WireResult:
        deadline = request.policy.max_wall_seconds + BACKSTOP_GRACE_SECONDS
        started = time.monotonic()
        try:
            response = httpx.post(
                url, content=request.to_bytes(),
                headers={"content-type": "application/json"}, timeout=deadline,
            )
        except httpx.TimeoutException:
            return self._timeout_result(request, time.monotonic() - started)
        except httpx.HTTPError as exc:
            raise RunnerUnavailable(f"runner endpoint unreachable: {exc}") from exc
        elapsed = time.monotonic() - started
        if response.status_code != 200:
            return self._error_result(request, f"runner returned HTTP {response.status_code}", elapsed)
        try:
            return parse_result_doc(response.json())
        except (ProtocolError, ValueError) as exc:
            return self._error_result(request, f"malformed runner result: {exc}", elapsed)

    @staticmethod
    def _timeout_result(request: ExecutionRequest, elapsed: float) -> WireResult:
        return WireResult(
            request_id=request.request_id, status="timeout", outputs=(), violations=(),
            log=f"orchestrator backstop: no result within {request.policy.max_wall_seconds}s"
                f" + {BACKSTOP_GRACE_SECONDS}s grace",
            wall_seconds=elapsed,
        )

    @staticmethod
    def _error_result(request: ExecutionRequest, log: str, elapsed: float) -> WireResult:
        return WireResult(
            request_id=request.request_id, status="error", outputs=(), violations=(),
            log=log, wall_seconds=elapsed,
        )

    # --- result ingestion -----------------------------------------------------

    def _ingest(self, request: ExecutionRequest, wire: WireResult) -> ExecutionResult:
        if wire.request_id != request.request_id:
            wire = self._error_result(request, "runner answered for a different request", wire.wall_seconds)
        outputs = []
        for out in wire.outputs:
            mime = out.mime_kind
            if len(out.payload) > INLINE_PAYLOAD_LIMIT and mime != "file":
                mime = "file"
            ref = self.workflow.content.put(out.payload)
            outputs.append(OutputArtifact(out.source_cell_index, mime, ref))
        result = ExecutionResult(
            request_id=request.request_id,
            status=wire.status,
            outputs=outputs,
            violations=list(wire.violations),
            log=wire.log,
            wall_seconds=wire.wall_seconds,
            app_id=request.app_id,
            version_no=request.version_no,
            purpose=request.purpose,
        )
        version = self.workflow.get_version(request.app_id, request.version_no)
        version.last_result_id = result.request_id
        self.workflow.store.commit([
            ("results", result.request_id, result.to_doc()),
            ("versions", version.ref, version.to_doc()),
        ])
        return result

    def get_result(self, request_id: str) -> ExecutionResult | None:
        doc = self.workflow.store.get("results", request_id)
        return ExecutionResult.from_doc(doc) if doc else None
