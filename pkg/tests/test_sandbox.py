import json

import pytest

from appforge.errors import BadInput, PolicyWidening, ProtocolError, WrongState
from appforge.sandbox import (
    ExecutionRequest,
    SandboxPolicy,
    merge_policy,
    mock_run,
    parse_request_doc,
    parse_result_doc,
)
from appforge.sandbox.orchestrator import sample_values
from appforge.sandbox.policy import PolicyOverride
from appforge.workflow import LifecycleState as S
from helpers import BINITA_MANIFEST_OK, binita_notebook, build_notebook


def make_request(notebook: bytes, policy=None, purpose="build_check", request_id="req-1") -> ExecutionRequest:
    return ExecutionRequest(
        request_id=request_id,
        app_id="app-x",
        version_no=1,
        notebook=notebook,
        manifest=("pandas",),
        policy=policy or SandboxPolicy(),
        purpose=purpose,
    )


class TestPolicy:
    def test_defaults(self):
        policy = SandboxPolicy()
        assert policy.network_allowlist == ()
        assert policy.credentials_mode == "read_only"
        assert policy.filesystem_scope == "workspace_only"

    def test_fixed_fields_rejected(self):
        with pytest.raises(BadInput):
            SandboxPolicy(credentials_mode="read_write")
        with pytest.raises(BadInput):
            SandboxPolicy(filesystem_scope="host")
        with pytest.raises(BadInput):
            SandboxPolicy(max_wall_seconds=0)

    def test_override_tightens(self):
        default = SandboxPolicy(network_allowlist=("internal-api", "geo-db"), max_wall_seconds=30, max_memory_mb=1024)
        merged = merge_policy(default, PolicyOverride(network_allowlist=("geo-db",), max_wall_seconds=10))
        assert merged.network_allowlist == ("geo-db",)
        assert merged.max_wall_seconds == 10
        assert merged.max_memory_mb == 1024

    def test_widening_rejected(self):
        default = SandboxPolicy(network_allowlist=("internal-api",))
        with pytest.raises(PolicyWidening):
            merge_policy(default, PolicyOverride(network_allowlist=("internal-api", "evil-host")))
        with pytest.raises(PolicyWidening):
            merge_policy(default, PolicyOverride(max_wall_seconds=99))
        with pytest.raises(PolicyWidening):
            merge_policy(default, PolicyOverride(max_memory_mb=999999))

    def test_none_override_is_identity(self):
        default = SandboxPolicy()
        assert merge_policy(default, None) == default


class TestWire:
    def test_request_round_trip(self):
        request = make_request(binita_notebook())
        doc = json.loads(request.to_bytes())
        parsed = parse_request_doc(doc)
        assert parsed == request

    def test_unknown_fields_rejected(self):
        doc = make_request(b"{}").to_doc()
        doc["surprise"] = 1
        with pytest.raises(ProtocolError):
            parse_request_doc(doc)

    def test_missing_fields_rejected(self):
        doc = make_request(b"{}").to_doc()
        del doc["policy"]
        with pytest.raises(ProtocolError):
            parse_request_doc(doc)

    def test_wrong_protocol_rejected(self):
        doc = make_request(b"{}").to_doc()
        doc["protocol"] = 2
        with pytest.raises(ProtocolError):
            parse_request_doc(doc)

    def test_result_round_trip(self):
        wire = mock_run(make_request(binita_notebook()))
        parsed = parse_result_doc(json.loads(wire.to_bytes()))
        assert parsed == wire

    def test_result_status_violation_coherence(self):
        wire = mock_run(make_request(binita_notebook()))
        doc = wire.to_doc()
        doc["violations"] = [{"kind": "network", "detail": "x"}]  # success + violations
        with pytest.raises(ProtocolError):
            parse_result_doc(doc)


class TestMockRunner:
    def test_one_text_output_per_code_cell_with_sorted_bindings(self, platform):
        app = platform.workflow.create_app("Spreadsheets Generator", owner="binita")
        version = platform.submit_version(app.app_id, binita_notebook(), BINITA_MANIFEST_OK, actor="binita")
        request = platform.orchestrator.build_execution_request(version, {"month": "May"}, "preview")
        wire = mock_run(request)
        assert wire.status == "success"
        assert len(wire.outputs) == 2
        for out in wire.outputs:
            assert out.mime_kind == "text"
            assert out.payload.decode() == f"cell {out.source_cell_index}: county_name=Sacramento, month=May"

    def test_zero_code_cells(self):
        wire = mock_run(make_request(build_notebook("---\ntitle: T\n---\n", [])))
        assert wire.status == "success"
        assert wire.outputs == ()

    def test_network_directive(self):
        nb = build_notebook("---\ntitle: T\n---\n", ["import requests  #!sandbox:network"])
        wire = mock_run(make_request(nb))
        assert wire.status == "policy_violation"
        assert wire.violations[0]["kind"] == "network"

    def test_sleep_directive(self):
        nb = build_notebook("---\ntitle: T\n---\n", ["#!sandbox:sleep"])
        assert mock_run(make_request(nb)).status == "timeout"

    def test_error_directive(self):
        nb = build_notebook("---\ntitle: T\n---\n", ["#!sandbox:error"])
        assert mock_run(make_request(nb)).status == "error"

    def test_determinism_byte_for_byte(self):
        request = make_request(binita_notebook())
        assert mock_run(request).to_bytes() == mock_run(request).to_bytes()

    def test_status_violation_coherence(self):
        for cells in ([], ["print(1)"], ["#!sandbox:error"], ["#!sandbox:sleep"], ["x #!sandbox:network"]):
            wire = mock_run(make_request(build_notebook("---\ntitle: T\n---\n", cells)))
            assert bool(wire.violations) == (wire.status == "policy_violation")


class TestOrchestrator:
    def submit(self, platform, notebook=None):
        app = platform.workflow.create_app("Spreadsheets Generator", owner="binita")
        return platform.submit_version(app.app_id, notebook or binita_notebook(), BINITA_MANIFEST_OK, actor="binita")

    def test_build_check_transitions_on_success(self, platform):
        version = self.submit(platform)
        assert version.state is S.SANDBOX_PASSED

    def test_build_check_failure_transitions(self, platform):
        nb = build_notebook("---\ntitle: Broken\n---\n", ["#!sandbox:error"])
        version = self.submit(platform, nb)
        assert version.state is S.SANDBOX_FAILED

    def test_network_violation_fails_build(self, platform):
        nb = build_notebook("---\ntitle: Fetching\n---\n", ["#!sandbox:network"])
        version = self.submit(platform, nb)
        assert version.state is S.SANDBOX_FAILED
        result = platform.orchestrator.get_result(version.last_result_id)
        assert result.status == "policy_violation"
        assert result.violations[0]["kind"] == "network"

    def test_request_requires_validated_state(self, platform):
        app = platform.workflow.create_app("App", owner="binita")
        version = platform.submit_version(app.app_id, b"broken", b"", actor="binita")
        assert version.state is S.VALIDATION_FAILED
        with pytest.raises(WrongState):
            platform.orchestrator.build_execution_request(version, {}, "preview")

    def test_outputs_live_in_content_store(self, platform):
        version = self.submit(platform)
        result = platform.orchestrator.get_result(version.last_result_id)
        assert result.status == "success"
        for out in result.outputs:
            payload = platform.content.get(out.payload_ref)
            assert payload.startswith(b"cell ")

    def test_no_code_cell_source_in_outputs(self, platform):
        version = self.submit(platform)
        notebook = platform.content.get(version.notebook_ref)
        from appforge.notebooks import parse_notebook

        sources = [c.source for c in parse_notebook(notebook).cells if c.kind == "code" and c.source]
        result = platform.orchestrator.get_result(version.last_result_id)
        for out in result.outputs:
            payload = platform.content.get(out.payload_ref).decode()
            for source in sources:
                assert source not in payload

    def test_oversize_payload_becomes_file_artifact(self, platform):
        from appforge.sandbox.wire import WireOutput, WireResult

        version = self.submit(platform)
        request = platform.orchestrator.build_execution_request(version, {}, "preview")
        big = WireResult(
            request_id=request.request_id,
            status="success",
            outputs=(WireOutput(1, "text", b"x" * (64 * 1024 + 1)),),
            violations=(),
            log="",
            wall_seconds=0.0,
        )
        result = platform.orchestrator._ingest(request, big)
        assert result.outputs[0].mime_kind == "file"

    def test_sample_values_fill_missing_defaults(self):
        from appforge.notebooks import extract_app_config, parse_notebook

        nb = build_notebook(
            "---\ntitle: T\ninputs:\n"
            "  - {name: a, widget: text}\n"
            "  - {name: b, widget: dropdown, choices: [x, y]}\n"
            "  - {name: c, widget: slider, min: 2, max: 9, step: 1}\n"
            "  - {name: d, widget: file, accept: ['.csv']}\n"
            "  - {name: e, widget: text, default: keep}\n"
            "---\n",
            [],
        )
        cfg = extract_app_config(parse_notebook(nb))
        assert sample_values(cfg) == {"a": "", "b": "x", "c": 2, "d": ""}
