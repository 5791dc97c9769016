"""Wire protocol v1, runner side.

The runner deliberately re-implements the contract instead of importing the
control plane: the canonical documents and the 8-byte big-endian framing are
the entire coupling surface between the two.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from typing import BinaryIO

PROTOCOL_VERSION = 1

PURPOSES = ("build_check", "preview", "live")
STATUSES = ("success", "error", "policy_violation", "timeout")
MIME_KINDS = ("text", "html", "image_png", "table", "file")

_REQUEST_FIELDS = {"protocol", "request_id", "version", "notebook_b64", "manifest", "policy", "purpose"}
_POLICY_FIELDS = {"network_allowlist", "max_wall_seconds", "max_memory_mb", "credentials_mode", "filesystem_scope"}


class WireError(Exception):
    pass


@dataclass
class RunnerRequest:
    request_id: str
    notebook: bytes
    manifest: list[str]
    network_allowlist: list[str]
    max_wall_seconds: float
    purpose: str


@dataclass
class RunnerOutput:
    source_cell_index: int
    mime_kind: str
    payload: bytes


@dataclass
class RunnerResult:
    request_id: str
    status: str
    outputs: list[RunnerOutput] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    log: str = ""
    wall_seconds: float = 0.0

    def to_doc(self) -> dict:
        return {
            "protocol": PROTOCOL_VERSION,
            "request_id": self.request_id,
            "status": self.status,
            "outputs": [
                {
                    "source_cell_index": o.source_cell_index,
                    "mime_kind": o.mime_kind,
                    "payload_b64": base64.b64encode(o.payload).decode("ascii"),
                }
                for o in self.outputs
            ],
            "violations": self.violations,
            "log": self.log,
            "wall_seconds": self.wall_seconds,
        }

    def to_bytes(self) -> bytes:
        return json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def parse_request(raw: bytes) -> RunnerRequest:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireError(f"request is not a UTF-8 JSON document: {exc}") from None
    if not isinstance(doc, dict) or set(doc) != _REQUEST_FIELDS:
        raise WireError("request fields do not match protocol v1")
    if doc["protocol"] != PROTOCOL_VERSION:
        raise WireError(f"unsupported protocol {doc['protocol']!r}")
    if doc["purpose"] not in PURPOSES:
        raise WireError(f"unknown purpose {doc['purpose']!r}")
    policy = doc["policy"]
    if not isinstance(policy, dict) or set(policy) != _POLICY_FIELDS:
        raise WireError("policy fields do not match protocol v1")
    try:
        notebook = base64.b64decode(doc["notebook_b64"], validate=True)
    except Exception:
        raise WireError("notebook_b64 is not valid base64") from None
    if not (isinstance(doc["manifest"], list) and all(isinstance(m, str) for m in doc["manifest"])):
        raise WireError("manifest must be a list of names")
    return RunnerRequest(
        request_id=doc["request_id"],
        notebook=notebook,
        manifest=list(doc["manifest"]),
        network_allowlist=list(policy["network_allowlist"]),
        max_wall_seconds=float(policy["max_wall_seconds"]),
        purpose=doc["purpose"],
    )


def read_framed(stream: BinaryIO) -> bytes:
    header = stream.read(8)
    if len(header) != 8:
        raise WireError("truncated frame header")
    length = int.from_bytes(header, "big")
    payload = stream.read(length)
    if len(payload) != length:
        raise WireError("truncated frame payload")
    return payload


def write_framed(stream: BinaryIO, payload: bytes) -> None:
    stream.write(len(payload).to_bytes(8, "big"))
    stream.write(payload)
    stream.flush()
