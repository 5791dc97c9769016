"""Acceptance suite: one test per shipping criterion, each prints a PASS line.

Runs entirely against the mock runner; no secondary component required.
"""

import random
import string
import struct
import subprocess
import time
from pathlib import Path

from fastapi.testclient import TestClient

from appforge.api import create_app
from appforge.canonical import utc_now
from appforge.deploy import make_slug
from appforge.errors import EmptyTitle, IllegalTransition, Unsluggable
from appforge.platform import Platform
from appforge.registry import PackageRegistryEntry, parse_manifest, validate_manifest
from appforge.workflow import LifecycleState as S
from appforge.workflow import content_hash, verify_audit_lines
from appforge.workflow.service import AppVersion
from appforge.workflow.states import AT_LEAST_VALIDATED, EVENTS, TRANSITIONS
from conftest import seed_registry, seed_users
from helpers import (
    BINITA_MANIFEST,
    SIRAK_MANIFEST,
    binita_notebook,
    sirak_notebook_v1,
    sirak_notebook_v2,
)
from test_content import BINITA_PAIR_DIGEST

GOLDENS = Path(__file__).parent / "goldens"

TOKENS = {
    "binita": "tok-binita", "sirak": "tok-sirak", "yaw": "tok-yaw",
    "marina": "tok-marina", "itsec": "tok-itsec",
}


def auth(user):
    return {"authorization": f"Bearer {TOKENS[user]}"}


def files(notebook: bytes, manifest: bytes):
    return {"notebook": ("notebook.ipynb", notebook), "manifest": ("requirements.txt", manifest)}


def replay_scenario_one(client) -> tuple[str, dict]:
    """The first user scenario, driven over the HTTP surface end to end."""
    app_id = client.post("/api/apps", json={"title": "Spreadsheets Generator"},
                         headers=auth("binita")).json()["app_id"]

    v1 = client.post(f"/api/apps/{app_id}/versions",
                     files=files(binita_notebook(), BINITA_MANIFEST), headers=auth("binita")).json()
    assert v1["state"] == "ValidationFailed"
    violations = v1["reports"]["manifest"]["violations"]
    assert [(v["name"], v["kind"]) for v in violations] == [("spacy", "not_in_registry")]

    assert client.post("/api/packages/requests",
                       json={"ecosystem": "pypi", "name": "spacy", "note": "NLP for reports"},
                       headers=auth("binita")).status_code == 200
    assert client.post("/api/packages/pypi/spacy/decision", json={"decision": "approve"},
                       headers=auth("itsec")).status_code == 200

    v2 = client.post(f"/api/apps/{app_id}/versions",
                     files=files(binita_notebook(), BINITA_MANIFEST), headers=auth("binita")).json()
    assert v2["state"] == "SandboxPassed"

    assert client.post(f"/api/versions/{app_id}:2/assign-reviewer", json={"reviewer": "yaw"},
                       headers=auth("binita")).status_code == 200
    changes = client.post(f"/api/versions/{app_id}:2/review",
                          json={"action": "request_changes", "comment": "clarify the chart title"},
                          headers=auth("yaw")).json()
    assert changes["state"] == "ChangesRequested"

    v3 = client.post(f"/api/apps/{app_id}/versions",
                     files=files(binita_notebook("Clarified Summary"), BINITA_MANIFEST),
                     headers=auth("binita")).json()
    assert v3["state"] == "SandboxPassed"
    assert client.post(f"/api/versions/{app_id}:3/assign-reviewer", json={"reviewer": "yaw"},
                       headers=auth("binita")).status_code == 200
    approved = client.post(f"/api/versions/{app_id}:3/review", json={"action": "approve"},
                           headers=auth("yaw")).json()
    assert approved["state"] == "Deployed"
    return app_id, approved


def test_scenario_one_replay():
    """Seed registry, fail on the unapproved package, approve, review, deploy."""
    started = time.monotonic()
    platform = Platform()
    seed_users(platform)
    seed_registry(platform)
    client = TestClient(create_app(platform))

    app_id, _ = replay_scenario_one(client)

    slug = platform.workflow.get_app(app_id).slug
    assert slug == "spreadsheets-generator"
    deployment = platform.deployments.deployments[slug]
    assert deployment.url == "https://apps.department.gov/internal/spreadsheets-generator"
    assert deployment.status == "active" and deployment.version_no == 3

    # pipeline order is visible in the audit chain, and the chain verifies
    states = [e.next_state for e in platform.audit.events
              if e.app_id == app_id and e.version_no == 3 and e.next_state]
    assert states == ["Submitted", "Validated", "SandboxRunning", "SandboxPassed",
                      "InReview", "Approved", "Deployed"]
    export = client.get("/api/audit", params={"from": 0}, headers=auth("itsec")).text
    assert verify_audit_lines([l for l in export.splitlines() if l]) == (True, None)

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"scenario took {elapsed:.2f}s"
    print(f"ACCEPTANCE PASS: scenario-one replay (deployed at /internal/{slug}, {elapsed:.2f}s)")


def test_scenario_two_replay_continues_registry():
    """Second author benefits from the earlier approval; dropdown revision schema."""
    platform = Platform()
    seed_users(platform)
    seed_registry(platform)
    client = TestClient(create_app(platform))
    replay_scenario_one(client)  # leaves spacy approved registry-wide

    app_id = client.post("/api/apps", json={"title": "Text Analysis Tool"},
                         headers=auth("sirak")).json()["app_id"]
    v1 = client.post(f"/api/apps/{app_id}/versions",
                     files=files(sirak_notebook_v1(), SIRAK_MANIFEST), headers=auth("sirak")).json()
    assert v1["reports"]["manifest"]["violations"] == []
    assert v1["state"] == "SandboxPassed"

    # reviewer suggests a dropdown and a clearer label; the revision is a new version
    assert client.post(f"/api/versions/{app_id}:1/assign-reviewer", json={"reviewer": "marina"},
                       headers=auth("sirak")).status_code == 200
    client.post(f"/api/versions/{app_id}:1/review",
                json={"action": "request_changes", "comment": "dropdown for days; label Day of Week"},
                headers=auth("marina"))
    v2 = client.post(f"/api/apps/{app_id}/versions",
                     files=files(sirak_notebook_v2(), SIRAK_MANIFEST), headers=auth("sirak")).json()
    assert v2["state"] == "SandboxPassed"
    client.post(f"/api/versions/{app_id}:2/assign-reviewer", json={"reviewer": "marina"},
                headers=auth("sirak"))
    approved = client.post(f"/api/versions/{app_id}:2/review", json={"action": "approve"},
                           headers=auth("marina")).json()
    assert approved["state"] == "Deployed"

    shell = client.get("/internal/text-analysis-tool", headers=auth("binita")).json()
    controls = shell["schema"]["controls"]
    assert len(controls) == 1
    assert controls[0]["widget"] == "dropdown"
    assert len(controls[0]["choices"]) == 7
    assert controls[0]["label"] == "Day of Week"
    print("ACCEPTANCE PASS: scenario-two replay (registry shared, dropdown schema served)")


def test_state_machine_fuzz():
    """1,000 random event walks: legality, typed rejections, audit replay."""
    rng = random.Random(20260810)
    platform = Platform()
    platform.users.create_user("binita", "Binita", ("author",), "t")
    wf = platform.workflow
    app = wf.create_app("Fuzz Target", owner="binita")

    def register_version(no: int) -> AppVersion:
        version = AppVersion(
            app_id=app.app_id, version_no=no, content_hash="0" * 64,
            notebook_ref="sha256:" + "0" * 64, manifest_ref="sha256:" + "0" * 64,
            state=S.SUBMITTED, submitted_by="binita", submitted_at=utc_now(),
        )
        batch = [("versions", version.ref, version.to_doc())]
        wf._audit_put(batch, actor="binita", action="submit", app_id=app.app_id,
                      version_no=no, next_state=S.SUBMITTED.value)
        wf.store.commit(batch)
        wf.versions[version.ref] = version
        return version

    applied = rejected = 0
    for no in range(1, 1001):
        version = register_version(no)
        for _ in range(rng.randint(1, 10)):
            event = rng.choice(EVENTS)
            before = version.state
            legal = (before, event) in TRANSITIONS
            try:
                after = wf.transition(version, event, actor="binita")
                assert legal, f"accepted illegal {before}/{event}"
                assert after is TRANSITIONS[(before, event)]
                applied += 1
            except IllegalTransition:
                assert not legal, f"rejected legal {before}/{event}"
                assert version.state is before
                rejected += 1

    replayed = wf.states_from_audit()
    for version in wf.versions.values():
        assert replayed[version.ref] == version.state.value
    assert platform.audit.verify() == (True, None)
    print(f"ACCEPTANCE PASS: state-machine fuzz (1000 walks, {applied} applied, {rejected} rejected)")


def test_whitelist_gate_fuzz():
    """500 random registry/manifest pairs: failing reports never pass the gate."""
    rng = random.Random(52960)
    pool = ["pandas", "numpy", "spacy", "geopandas", "polars", "arrow", "dplyr", "shiny"]
    gated = passed = 0
    for trial in range(500):
        platform = Platform()
        platform.users.create_user("binita", "Binita", ("author",), "t")
        registry_rows = []
        for name in pool:
            status = rng.choice(["approved", "pending", "rejected", "absent"])
            if status == "absent":
                continue
            allowed = rng.choice(["any", ">=1.0", ">=2.0,<3.0", "==2.1.0"])
            row = PackageRegistryEntry(
                ecosystem="pypi", normalized_name=name, status=status,
                allowed_versions=allowed if status == "approved" else "any",
                decided_by="itsec" if status != "pending" else None,
                decided_at=utc_now() if status != "pending" else None,
                created_at=utc_now(),
            )
            platform.registry.seed(row)
            registry_rows.append(row)

        chosen = rng.sample(pool, rng.randint(0, 5))
        lines = []
        for name in chosen:
            constraint = rng.choice(["", "==1.5", "==2.1.0", ">=2.0", "<1.0", "~=2.1"])
            lines.append(name + constraint)
        manifest = ("\n".join(lines) + "\n").encode() if lines else b""

        expected = validate_manifest(parse_manifest(manifest, "pypi"), registry_rows)
        app = platform.workflow.create_app("Fuzz", owner="binita")
        version = platform.submit_version(app.app_id, binita_notebook(), manifest, actor="binita")

        if expected.passed:
            assert version.state in AT_LEAST_VALIDATED
            passed += 1
        else:
            assert version.state is S.VALIDATION_FAILED
            assert version.state not in AT_LEAST_VALIDATED
            gated += 1
    print(f"ACCEPTANCE PASS: whitelist gate fuzz (500 pairs, {gated} gated, {passed} passed)")


def test_audit_tamper_evidence():
    """100 single-byte flips in persisted events: always caught at or before."""
    platform = Platform()
    seed_users(platform)
    seed_registry(platform)
    client = TestClient(create_app(platform))
    replay_scenario_one(client)

    stored = [doc["line"].encode() for _, doc in sorted(platform.store.scan("audit").items())]
    assert len(stored) >= 20
    rng = random.Random(777)
    for trial in range(100):
        lines = list(stored)
        k = rng.randrange(len(lines))
        line = bytearray(lines[k])
        pos = rng.randrange(len(line))
        line[pos] ^= 1 << rng.randrange(8)
        if bytes(line) == lines[k]:  # xor can never be identity here, but keep the guard honest
            continue
        lines[k] = bytes(line)
        ok, first_bad = verify_audit_lines(lines)
        assert not ok, f"trial {trial}: flip in event {k + 1} went undetected"
        assert first_bad <= k + 1, f"trial {trial}: reported {first_bad}, flipped {k + 1}"
    print("ACCEPTANCE PASS: audit tamper evidence (100 byte-flip trials)")


def test_golden_widget_schemas():
    """Fixture configs serialize byte-identically to the frozen goldens."""
    from appforge.notebooks import extract_app_config, generate_widget_schema, parse_notebook
    from helpers import empty_config_notebook

    cases = [
        (binita_notebook(), "schema_binita.json"),
        (sirak_notebook_v2(), "schema_sirak.json"),
        (empty_config_notebook(), "schema_empty.json"),
    ]
    for raw, golden in cases:
        cfg = extract_app_config(parse_notebook(raw))
        assert generate_widget_schema(cfg).to_bytes() == (GOLDENS / golden).read_bytes(), golden
    print("ACCEPTANCE PASS: golden widget schemas (3 fixtures byte-identical)")


def test_hash_contract_against_external_tool(tmp_path):
    """Version identity digest matches sha256sum over the specified framing."""
    nb, mf = binita_notebook(), BINITA_MANIFEST
    framed = struct.pack(">Q", len(nb)) + nb + struct.pack(">Q", len(mf)) + mf
    path = tmp_path / "framed.bin"
    path.write_bytes(framed)
    external = subprocess.run(["sha256sum", str(path)], check=True,
                              capture_output=True, text=True).stdout.split()[0]
    ours = content_hash(nb, mf)
    assert ours == external == BINITA_PAIR_DIGEST
    print(f"ACCEPTANCE PASS: hash contract (sha256sum agrees: {ours[:16]}…)")


def test_slug_properties_thousand_titles():
    """Idempotence, charset, 63-char cap, collision suffixing over 1,000 titles."""
    rng = random.Random(424242)
    alphabet = string.ascii_letters + string.digits + " ._!-–#/()"
    existing: set[str] = set()
    minted = 0
    for _ in range(1000):
        title = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 100)))
        try:
            slug = make_slug(title, existing)
        except (EmptyTitle, Unsluggable):
            continue
        assert 1 <= len(slug) <= 63
        assert all(c in string.ascii_lowercase + string.digits + "-" for c in slug)
        assert not slug.startswith("-") and not slug.endswith("-")
        assert slug not in existing
        assert make_slug(slug, set()) == slug  # idempotent on conforming titles
        existing.add(slug)
        minted += 1
    # collision suffixing: identical titles mint -2, -3, ...
    collisions = {make_slug("Busy Title", existing | {"busy-title"} | {f"busy-title-{i}" for i in range(2, 9)})}
    assert collisions == {"busy-title-9"}
    assert minted > 500
    print(f"ACCEPTANCE PASS: slug properties ({minted} slugs minted, all constraints held)")


def test_crash_recovery_in_scenario_replay(tmp_path):
    """A crash between any two commit batches recovers audit-consistent."""
    platform = Platform(data_dir=tmp_path)
    seed_users(platform)
    seed_registry(platform)
    client = TestClient(create_app(platform))
    replay_scenario_one(client)
    platform.close()

    wal = tmp_path / "appforge.wal"
    lines = wal.read_bytes().splitlines(keepends=True)
    assert len(lines) > 30
    for k in range(len(lines) + 1):
        crash_dir = tmp_path / f"crash_{k}"
        crash_dir.mkdir()
        (crash_dir / "appforge.wal").write_bytes(b"".join(lines[:k]))
        (crash_dir / "blobs").symlink_to(tmp_path / "blobs")
        recovered = Platform.recover(crash_dir)
        ok, bad = recovered.audit.verify()
        assert ok, f"crash after batch {k}: chain broken at {bad}"
        replayed = recovered.workflow.states_from_audit()
        for version in recovered.workflow.versions.values():
            assert replayed.get(version.ref) == version.state.value, (
                f"crash after batch {k}: {version.ref} is {version.state.value}, audit says {replayed.get(version.ref)}"
            )
        recovered.close()
    print(f"ACCEPTANCE PASS: crash recovery ({len(lines)} batch boundaries, all audit-consistent)")
