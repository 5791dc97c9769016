"""Runner wire protocol v1.

One canonical UTF-8 request document in, one result document out, over the
runner's transport (length-prefixed stdin/stdout frames or an HTTP POST).
Parsing is strict: unknown fields, missing fields, or a wrong protocol number
are protocol errors, and violations must be coherent with the status.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass, field
from numbers import Real
from typing import BinaryIO

from ..canonical import canonical_bytes
from ..errors import ProtocolError
from .policy import SandboxPolicy

PROTOCOL_VERSION = 1

PURPOSES = ("build_check", "preview", "live")
STATUSES = ("success", "error", "policy_violation", "timeout")
MIME_KINDS = ("text", "html", "image_png", "table", "file")
VIOLATION_KINDS = ("network", "import", "filesystem", "credentials")

_REQUEST_FIELDS = {"protocol", "request_id", "version", "notebook_b64", "manifest", "policy", "purpose"}
_RESULT_FIELDS = {"protocol", "request_id", "status", "outputs", "violations", "log", "wall_seconds"}
_POLICY_FIELDS = {"network_allowlist", "max_wall_seconds", "max_memory_mb", "credentials_mode", "filesystem_scope"}
_OUTPUT_FIELDS = {"source_cell_index", "mime_kind", "payload_b64"}
_VIOLATION_FIELDS = {"kind", "detail"}


@dataclass(frozen=True)
class ExecutionRequest:
    request_id: str
    app_id: str
    version_no: int
    notebook: bytes
    manifest: tuple[str, ...]
    policy: SandboxPolicy
    purpose: str

    def to_doc(self) -> dict:
        return {
            "protocol": PROTOCOL_VERSION,
            "request_id": self.request_id,
            "version": {"app_id": self.app_id, "version_no": self.version_no},
            "notebook_b64": base64.b64encode(self.notebook).decode("ascii"),
            "manifest": list(self.manifest),
            "policy": self.policy.to_doc(),
            "purpose": self.purpose,
        }

    def to_bytes(self) -> bytes:
        return canonical_bytes(self.to_doc())


@dataclass(frozen=True)
class WireOutput:
    """Output as carried on the wire: payload inline, base64."""

    source_cell_index: int
    mime_kind: str
    payload: bytes

    def to_doc(self) -> dict:
        return {
            "source_cell_index": self.source_cell_index,
            "mime_kind": self.mime_kind,
            "payload_b64": base64.b64encode(self.payload).decode("ascii"),
        }


@dataclass(frozen=True)
class WireResult:
    """Result document as produced by a runner, before payload ingestion."""

    request_id: str
    status: str
    outputs: tuple[WireOutput, ...]
    violations: tuple[dict, ...]
    log: str
    wall_seconds: float

    def to_doc(self) -> dict:
        return {
            "protocol": PROTOCOL_VERSION,
            "request_id": self.request_id,
            "status": self.status,
            "outputs": [o.to_doc() for o in self.outputs],
            "violations": [dict(v) for v in self.violations],
            "log": self.log,
            "wall_seconds": self.wall_seconds,
        }

    def to_bytes(self) -> bytes:
        return canonical_bytes(self.to_doc())


@dataclass(frozen=True)
class OutputArtifact:
    """Output as persisted: payload in the content store, referenced."""

    source_cell_index: int
    mime_kind: str
    payload_ref: str

    def to_doc(self) -> dict:
        return {
            "source_cell_index": self.source_cell_index,
            "mime_kind": self.mime_kind,
            "payload_ref": self.payload_ref,
        }


@dataclass
class ExecutionResult:
    request_id: str
    status: str
    outputs: list[OutputArtifact] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    log: str = ""
    wall_seconds: float = 0.0
    app_id: str = ""
    version_no: int = 0
    purpose: str = ""

    def to_doc(self) -> dict:
        return {
            "request_id": self.request_id,
            "status": self.status,
            "outputs": [o.to_doc() for o in self.outputs],
            "violations": [dict(v) for v in self.violations],
            "log": self.log,
            "wall_seconds": self.wall_seconds,
            "app_id": self.app_id,
            "version_no": self.version_no,
            "purpose": self.purpose,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ExecutionResult":
        doc = dict(doc)
        doc["outputs"] = [OutputArtifact(**o) for o in doc.get("outputs", [])]
        return cls(**doc)


# --- strict parsing -----------------------------------------------------------


def _require_keys(doc: dict, required: set, what: str) -> None:
    if not isinstance(doc, dict):
        raise ProtocolError(f"{what} is not an object")
    missing = required - set(doc)
    unknown = set(doc) - required
    if missing:
        raise ProtocolError(f"{what} missing fields: {sorted(missing)}")
    if unknown:
        raise ProtocolError(f"{what} has unknown fields: {sorted(unknown)}")


def parse_request_doc(doc: dict) -> ExecutionRequest:
    _require_keys(doc, _REQUEST_FIELDS, "request")
    if doc["protocol"] != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol {doc['protocol']!r}")
    if doc["purpose"] not in PURPOSES:
        raise ProtocolError(f"unknown purpose {doc['purpose']!r}")
    _require_keys(doc["version"], {"app_id", "version_no"}, "request.version")
    _require_keys(doc["policy"], _POLICY_FIELDS, "request.policy")
    if not isinstance(doc["request_id"], str) or not doc["request_id"]:
        raise ProtocolError("request_id must be a non-empty string")
    if not (isinstance(doc["manifest"], list) and all(isinstance(m, str) for m in doc["manifest"])):
        raise ProtocolError("manifest must be a list of names")
    try:
        notebook = base64.b64decode(doc["notebook_b64"], validate=True)
    except Exception:
        raise ProtocolError("notebook_b64 is not valid base64") from None
    try:
        policy = SandboxPolicy.from_doc(doc["policy"])
    except Exception as exc:
        raise ProtocolError(f"bad policy: {exc}") from None
    return ExecutionRequest(
        request_id=doc["request_id"],
        app_id=doc["version"]["app_id"],
        version_no=doc["version"]["version_no"],
        notebook=notebook,
        manifest=tuple(doc["manifest"]),
        policy=policy,
        purpose=doc["purpose"],
    )


def parse_result_doc(doc: dict) -> WireResult:
    _require_keys(doc, _RESULT_FIELDS, "result")
    if doc["protocol"] != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol {doc['protocol']!r}")
    if doc["status"] not in STATUSES:
        raise ProtocolError(f"unknown status {doc['status']!r}")
    if not isinstance(doc["log"], str):
        raise ProtocolError("log must be a string")
    if not isinstance(doc["wall_seconds"], Real) or isinstance(doc["wall_seconds"], bool):
        raise ProtocolError("wall_seconds must be a number")
    outputs = []
    for i, o in enumerate(doc["outputs"]):
        _require_keys(o, _OUTPUT_FIELDS, f"result.outputs[{i}]")
        if o["mime_kind"] not in MIME_KINDS:
            raise ProtocolError(f"unknown mime_kind {o['mime_kind']!r}")
        if not isinstance(o["source_cell_index"], int):
            raise ProtocolError("source_cell_index must be an integer")
        try:
            payload = base64.b64decode(o["payload_b64"], validate=True)
        except Exception:
            raise ProtocolError(f"result.outputs[{i}] payload is not valid base64") from None
        outputs.append(WireOutput(o["source_cell_index"], o["mime_kind"], payload))
    violations = []
    for i, v in enumerate(doc["violations"]):
        _require_keys(v, _VIOLATION_FIELDS, f"result.violations[{i}]")
        if v["kind"] not in VIOLATION_KINDS:
            raise ProtocolError(f"unknown violation kind {v['kind']!r}")
        violations.append({"kind": v["kind"], "detail": v["detail"]})
    if bool(violations) != (doc["status"] == "policy_violation"):
        raise ProtocolError("violations must be non-empty exactly when status is policy_violation")
    return WireResult(
        request_id=doc["request_id"],
        status=doc["status"],
        outputs=tuple(outputs),
        violations=tuple(violations),
        log=doc["log"],
        wall_seconds=doc["wall_seconds"],
    )


# --- stdin/stdout framing -------------------------------------------------------


def write_framed(stream: BinaryIO, payload: bytes) -> None:
    stream.write(len(payload).to_bytes(8, "big"))
    stream.write(payload)
    stream.flush()


def read_framed(stream: BinaryIO, limit: int = 256 * 1024 * 1024) -> bytes:
    header = stream.read(8)
    if len(header) != 8:
        raise ProtocolError("truncated frame header")
    length = int.from_bytes(header, "big")
    if length > limit:
        raise ProtocolError(f"frame of {length} bytes exceeds limit")
    payload = stream.read(length)
    if len(payload) != length:
        raise ProtocolError("truncated frame payload")
    return payload
