"""Policy-restricted execution: requests, wire protocol v1, runners, dispatch."""

from .mock_runner import mock_run
from .orchestrator import Orchestrator, sample_values
from .policy import SandboxPolicy, merge_policy
from .wire import (
    PROTOCOL_VERSION,
    ExecutionRequest,
    ExecutionResult,
    OutputArtifact,
    parse_request_doc,
    parse_result_doc,
    read_framed,
    write_framed,
)

__all__ = [
    "ExecutionRequest",
    "ExecutionResult",
    "Orchestrator",
    "OutputArtifact",
    "PROTOCOL_VERSION",
    "SandboxPolicy",
    "merge_policy",
    "mock_run",
    "parse_request_doc",
    "parse_result_doc",
    "read_framed",
    "sample_values",
    "write_framed",
]
