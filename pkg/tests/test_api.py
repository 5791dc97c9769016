import pytest
from fastapi.testclient import TestClient

from appforge.api import ACCESS_TABLE, create_app
from appforge.platform import Platform
from appforge.workflow import verify_audit_lines
from conftest import seed_registry, seed_users
from helpers import BINITA_MANIFEST, BINITA_MANIFEST_OK, binita_notebook

TOKENS = {
    "binita": "tok-binita",
    "sirak": "tok-sirak",
    "yaw": "tok-yaw",
    "marina": "tok-marina",
    "itsec": "tok-itsec",
}


def auth(user):
    return {"authorization": f"Bearer {TOKENS[user]}"}


def submit_files(notebook: bytes, manifest: bytes):
    return {"notebook": ("notebook.ipynb", notebook), "manifest": ("requirements.txt", manifest)}


@pytest.fixture
def client(platform):
    return TestClient(create_app(platform))


def make_app(client, title="Spreadsheets Generator", user="binita") -> str:
    response = client.post("/api/apps", json={"title": title}, headers=auth(user))
    assert response.status_code == 200, response.text
    return response.json()["app_id"]


def submit_ok(client, app_id, user="binita"):
    response = client.post(
        f"/api/apps/{app_id}/versions",
        files=submit_files(binita_notebook(), BINITA_MANIFEST_OK),
        headers=auth(user),
    )
    assert response.status_code == 200, response.text
    return response.json()


class TestAuth:
    def test_missing_token(self, client):
        assert client.get("/api/apps").status_code == 401

    def test_unknown_token(self, client):
        assert client.get("/api/apps", headers={"authorization": "Bearer nope"}).status_code == 401

    def test_valid_token(self, client):
        assert client.get("/api/apps", headers=auth("binita")).status_code == 200


class TestPipeline:
    def test_submission_with_unapproved_package_reports_violation(self, client):
        app_id = make_app(client)
        response = client.post(
            f"/api/apps/{app_id}/versions",
            files=submit_files(binita_notebook(), BINITA_MANIFEST),
            headers=auth("binita"),
        )
        assert response.status_code == 200
        body = response.json()
        assert body["state"] == "ValidationFailed"
        violations = body["reports"]["manifest"]["violations"]
        assert [(v["name"], v["kind"]) for v in violations] == [("spacy", "not_in_registry")]

    def test_full_review_loop(self, client, platform):
        app_id = make_app(client)
        version = submit_ok(client, app_id)
        assert version["state"] == "SandboxPassed"

        assigned = client.post(
            f"/api/versions/{app_id}:1/assign-reviewer",
            json={"reviewer": "yaw"}, headers=auth("binita"),
        )
        assert assigned.status_code == 200
        preview_url = assigned.json()["preview_url"]
        token = preview_url.rsplit("/", 1)[1]

        shell = client.get(f"/preview/{token}", headers=auth("yaw"))
        assert shell.status_code == 200
        assert shell.json()["schema"]["app_title"] == "Spreadsheets Generator"

        run = client.post(f"/preview/{token}/run", json={"params": {"month": "May"}}, headers=auth("yaw"))
        assert run.status_code == 200
        assert run.json()["status"] == "success"

        decided = client.post(
            f"/api/versions/{app_id}:1/review",
            json={"action": "approve", "comment": "ship it"}, headers=auth("yaw"),
        )
        assert decided.status_code == 200
        assert decided.json()["state"] == "Deployed"

        shell = client.get("/internal/spreadsheets-generator", headers=auth("marina"))
        assert shell.status_code == 200
        run = client.post(
            "/internal/spreadsheets-generator/run",
            json={"params": {"month": "June", "county_name": "Kern"}}, headers=auth("marina"),
        )
        assert run.status_code == 200
        outputs = run.json()["outputs"]
        assert any("county_name=Kern" in (o.get("payload_text") or "") for o in outputs)

    def test_package_request_and_decision(self, client):
        response = client.post(
            "/api/packages/requests",
            json={"ecosystem": "pypi", "name": "spacy", "note": "NLP"}, headers=auth("binita"),
        )
        assert response.status_code == 200
        assert response.json()["status"] == "pending"
        decided = client.post(
            "/api/packages/pypi/spacy/decision",
            json={"decision": "approve", "allowed_versions": ">=3.0"}, headers=auth("itsec"),
        )
        assert decided.status_code == 200
        assert decided.json()["status"] == "approved"

    def test_registry_tsv_export(self, client):
        response = client.get("/api/registry", params={"format": "tsv"}, headers=auth("binita"))
        assert response.status_code == 200
        lines = response.text.strip().split("\n")
        assert all(len(line.split("\t")) == 6 for line in lines)

    def test_audit_stream_verifies_offline(self, client):
        app_id = make_app(client)
        submit_ok(client, app_id)
        response = client.get("/api/audit", params={"from": 0}, headers=auth("itsec"))
        assert response.status_code == 200
        lines = [l for l in response.text.splitlines() if l]
        assert verify_audit_lines(lines) == (True, None)
        assert len(lines) >= 5


class TestErrorMapping:
    def test_unknown_app_404(self, client):
        assert client.get("/api/apps/app-nope/versions", headers=auth("binita")).status_code == 404

    def test_submit_by_non_owner_403(self, client):
        app_id = make_app(client)
        response = client.post(
            f"/api/apps/{app_id}/versions",
            files=submit_files(b"x", b""), headers=auth("sirak"),
        )
        assert response.status_code == 403

    def test_review_by_unassigned_403(self, client):
        app_id = make_app(client)
        submit_ok(client, app_id)
        client.post(f"/api/versions/{app_id}:1/assign-reviewer", json={"reviewer": "yaw"}, headers=auth("binita"))
        response = client.post(
            f"/api/versions/{app_id}:1/review", json={"action": "approve"}, headers=auth("marina")
        )
        assert response.status_code == 403

    def test_wrong_state_409(self, client):
        app_id = make_app(client)
        submit_ok(client, app_id)
        response = client.post(
            f"/api/versions/{app_id}:1/review", json={"action": "approve"}, headers=auth("yaw")
        )
        assert response.status_code == 409

    def test_double_package_request_409(self, client):
        client.post("/api/packages/requests", json={"ecosystem": "pypi", "name": "spacy"}, headers=auth("binita"))
        response = client.post(
            "/api/packages/requests", json={"ecosystem": "pypi", "name": "spacy"}, headers=auth("sirak")
        )
        assert response.status_code == 409

    def test_bad_run_purpose_400(self, client):
        app_id = make_app(client)
        submit_ok(client, app_id)
        response = client.post(
            f"/api/versions/{app_id}:1/run", json={"params": {}, "purpose": "live"}, headers=auth("binita")
        )
        assert response.status_code == 400

    def test_bad_parameter_binding_400(self, client):
        app_id = make_app(client)
        submit_ok(client, app_id)
        response = client.post(
            f"/api/versions/{app_id}:1/run",
            json={"params": {"month": "Remember"}}, headers=auth("binita"),
        )
        assert response.status_code == 400

    def test_unknown_slug_404(self, client):
        assert client.get("/internal/nothing-here", headers=auth("binita")).status_code == 404


def _build_matrix_context():
    """Fresh platform + client with every endpoint's preconditions in place."""
    platform = Platform()
    seed_users(platform)
    seed_registry(platform)
    client = TestClient(create_app(platform))
    app1 = make_app(client, "Spreadsheets Generator")
    submit_ok(client, app1)
    client.post(f"/api/versions/{app1}:1/assign-reviewer", json={"reviewer": "yaw"}, headers=auth("binita"))
    client.post(f"/api/versions/{app1}:1/review", json={"action": "approve"}, headers=auth("yaw"))

    app2 = make_app(client, "Second Tool")
    submit_ok(client, app2)
    assigned = client.post(
        f"/api/versions/{app2}:1/assign-reviewer", json={"reviewer": "yaw"}, headers=auth("binita")
    )
    token = assigned.json()["preview_url"].rsplit("/", 1)[1]
    submit_ok(client, app2)  # v2 sits at SandboxPassed for assign-reviewer checks

    client.post("/api/packages/requests", json={"ecosystem": "pypi", "name": "spacy"}, headers=auth("binita"))

    requests = {
        ("POST", "/api/apps"): ("post", "/api/apps", {"json": {"title": "Matrix App"}}),
        ("GET", "/api/apps"): ("get", "/api/apps", {}),
        ("POST", "/api/apps/{app_id}/versions"): (
            "post", f"/api/apps/{app1}/versions",
            {"files": submit_files(binita_notebook(), BINITA_MANIFEST_OK)},
        ),
        ("GET", "/api/apps/{app_id}/versions"): ("get", f"/api/apps/{app1}/versions", {}),
        ("POST", "/api/versions/{version_id}/assign-reviewer"): (
            "post", f"/api/versions/{app2}:2/assign-reviewer", {"json": {"reviewer": "marina"}},
        ),
        ("POST", "/api/versions/{version_id}/review"): (
            "post", f"/api/versions/{app2}:1/review", {"json": {"action": "approve"}},
        ),
        ("POST", "/api/versions/{version_id}/run"): (
            "post", f"/api/versions/{app1}:1/run", {"json": {"params": {}}},
        ),
        ("POST", "/api/packages/requests"): (
            "post", "/api/packages/requests", {"json": {"ecosystem": "pypi", "name": "polars"}},
        ),
        ("POST", "/api/packages/{ecosystem}/{name}/decision"): (
            "post", "/api/packages/pypi/spacy/decision", {"json": {"decision": "approve"}},
        ),
        ("GET", "/api/registry"): ("get", "/api/registry", {}),
        ("GET", "/api/audit"): ("get", "/api/audit", {}),
        ("POST", "/api/deployments/{slug}/scale"): (
            "post", "/api/deployments/spreadsheets-generator/scale", {"json": {"replicas": 2}},
        ),
        ("POST", "/api/deployments/{slug}/retire"): (
            "post", "/api/deployments/spreadsheets-generator/retire", {},
        ),
        ("POST", "/api/apps/{app_id}/rollback"): (
            "post", f"/api/apps/{app1}/rollback", {"json": {"version_no": 1}},
        ),
        ("GET", "/internal/{slug}"): ("get", "/internal/spreadsheets-generator", {}),
        ("POST", "/internal/{slug}/run"): (
            "post", "/internal/spreadsheets-generator/run", {"json": {"params": {}}},
        ),
        ("GET", "/preview/{token}"): ("get", f"/preview/{token}", {}),
        ("POST", "/preview/{token}/run"): ("post", f"/preview/{token}/run", {"json": {"params": {}}}),
    }
    return client, requests


def _allowed(access: str, user: str) -> bool:
    roles = {
        "binita": {"author"}, "sirak": {"author"}, "yaw": {"author", "reviewer"},
        "marina": {"reviewer"}, "itsec": {"admin"},
    }[user]
    if access == "any":
        return True
    if access == "author":
        return "author" in roles
    if access == "admin":
        return "admin" in roles
    if access == "owner_or_admin":
        return user == "binita" or "admin" in roles  # binita owns every fixture app
    if access == "assigned_reviewer":
        return user == "yaw"
    if access == "preview_party":
        return user in ("binita", "yaw")  # author and assigned reviewer
    raise AssertionError(f"unknown access class {access}")


class TestAccessMatrix:
    def test_anonymous_is_401_everywhere(self):
        client, requests = _build_matrix_context()
        for key in [(m, p) for m, p, _, _ in ACCESS_TABLE]:
            method, path, kwargs = requests[key]
            response = getattr(client, method)(path, **kwargs)
            assert response.status_code == 401, f"{key} anonymous -> {response.status_code}"

    @pytest.mark.parametrize("user", ["binita", "sirak", "yaw", "marina", "itsec"])
    def test_role_matrix(self, user):
        for method, path_template, _, access in ACCESS_TABLE:
            client, requests = _build_matrix_context()
            req_method, path, kwargs = requests[(method, path_template)]
            response = getattr(client, req_method)(path, **kwargs, headers=auth(user))
            if _allowed(access, user):
                assert response.status_code not in (401, 403), (
                    f"{method} {path_template}: {user} should be allowed, got {response.status_code}: {response.text}"
                )
            else:
                assert response.status_code == 403, (
                    f"{method} {path_template}: {user} should be forbidden, got {response.status_code}: {response.text}"
                )
