"""FastAPI service wrapping the platform.

Every mutating endpoint calls exactly one platform operation; errors map to
status codes uniformly: malformed input 400, authentication 401,
authorization 403, missing entities 404, precondition failures 409.
"""

from __future__ import annotations

import json

from fastapi import Depends, FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse

from ..errors import (
    AppforgeError,
    BadInput,
    Conflict,
    Forbidden,
    NotFound,
    ProtocolError,
    RunnerUnavailable,
    StorageError,
    Unauthenticated,
)
from ..notebooks import extract_app_config, parse_notebook
from ..platform import Platform
from ..registry import export_registry_tsv
from ..sandbox.wire import ExecutionResult
from ..users import UserRecord
from ..workflow.service import Application, AppVersion
from .schemas import (
    AppOut,
    AppShellOut,
    AssignReviewerOut,
    AssignReviewerRequest,
    CreateAppRequest,
    DeploymentOut,
    OutputOut,
    PackageDecisionBody,
    PackageRequestBody,
    RegistryEntryOut,
    ReviewRequest,
    RollbackRequest,
    RunOut,
    RunRequest,
    ScaleRequest,
    VersionOut,
)

# method, path template, owning CLI command group, access rule
ACCESS_TABLE = [
    ("POST", "/api/apps", "app create", "author"),
    ("GET", "/api/apps", "app list", "any"),
    ("POST", "/api/apps/{app_id}/versions", "submit", "owner_or_admin"),
    ("GET", "/api/apps/{app_id}/versions", "status", "any"),
    ("POST", "/api/versions/{version_id}/assign-reviewer", "review assign", "owner_or_admin"),
    ("POST", "/api/versions/{version_id}/review", "review decide", "assigned_reviewer"),
    ("POST", "/api/versions/{version_id}/run", "run", "owner_or_admin"),
    ("POST", "/api/packages/requests", "registry request", "any"),
    ("POST", "/api/packages/{ecosystem}/{name}/decision", "registry decide", "admin"),
    ("GET", "/api/registry", "registry list", "any"),
    ("GET", "/api/audit", "audit export", "any"),
    ("POST", "/api/deployments/{slug}/scale", "deploy scale", "admin"),
    ("POST", "/api/deployments/{slug}/retire", "deploy retire", "owner_or_admin"),
    ("POST", "/api/apps/{app_id}/rollback", "deploy rollback", "owner_or_admin"),
    ("GET", "/internal/{slug}", "schema", "any"),
    ("POST", "/internal/{slug}/run", "run", "any"),
    ("GET", "/preview/{token}", "preview show", "preview_party"),
    ("POST", "/preview/{token}/run", "preview run", "preview_party"),
]

_STATUS_BY_ERROR = (
    (Unauthenticated, 401),
    (Forbidden, 403),
    (NotFound, 404),
    (BadInput, 400),
    (Conflict, 409),
    ((StorageError, RunnerUnavailable, ProtocolError), 503),
)


def _status_for(exc: AppforgeError) -> int:
    for types, status in _STATUS_BY_ERROR:
        if isinstance(exc, types):
            return status
    return 500


def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="appforge", version="0.1.0")
    app.state.platform = platform

    @app.exception_handler(AppforgeError)
    async def appforge_error_handler(request: Request, exc: AppforgeError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    def current_user(request: Request) -> UserRecord:
        header = request.headers.get("authorization", "")
        token = header.removeprefix("Bearer ").strip() if header.startswith("Bearer ") else None
        return platform.users.authenticate(token)

    def require_owner_or_admin(user: UserRecord, app_record: Application) -> None:
        if user.user_id != app_record.owner and "admin" not in user.roles:
            raise Forbidden(f"{user.user_id} is neither the owner nor an admin")

    def resolve_version(version_id: str) -> AppVersion:
        return platform.workflow.resolve_ref(version_id)

    def app_out(record: Application) -> AppOut:
        history = platform.workflow.version_history(record.app_id)
        latest = history[-1] if history else None
        return AppOut(
            **record.to_doc(),
            latest_version_no=latest.version_no if latest else None,
            latest_state=latest.state.value if latest else None,
        )

    def run_out(result: ExecutionResult) -> RunOut:
        outputs = []
        for artifact in result.outputs:
            payload = platform.content.get(artifact.payload_ref)
            entry = OutputOut(**artifact.to_doc())
            if artifact.mime_kind in ("text", "html", "table"):
                try:
                    entry.payload_text = payload.decode("utf-8")
                except UnicodeDecodeError:
                    pass
            if entry.payload_text is None:
                import base64

                entry.payload_b64 = base64.b64encode(payload).decode("ascii")
            outputs.append(entry)
        return RunOut(
            request_id=result.request_id,
            status=result.status,
            outputs=outputs,
            violations=result.violations,
            log=result.log,
            wall_seconds=result.wall_seconds,
        )

    def shell_out(slug_or_token: str, version: AppVersion) -> AppShellOut:
        schema_bytes = platform.widget_schema_for(version)
        cfg = extract_app_config(parse_notebook(platform.content.get(version.notebook_ref)))
        return AppShellOut(
            slug=slug_or_token,
            app_id=version.app_id,
            version_no=version.version_no,
            title=cfg.title,
            schema=json.loads(schema_bytes),
            schema_canonical=schema_bytes.decode("utf-8"),
        )

    # --- applications ------------------------------------------------------

    @app.post("/api/apps", response_model=AppOut)
    def create_application(body: CreateAppRequest, user: UserRecord = Depends(current_user)):
        if "author" not in user.roles:
            raise Forbidden("creating applications requires the author role")
        record = platform.workflow.create_app(
            body.title, owner=user.user_id, ecosystem=body.ecosystem, description=body.description
        )
        return app_out(record)

    @app.get("/api/apps", response_model=list[AppOut])
    def list_applications(user: UserRecord = Depends(current_user)):
        return [app_out(a) for a in platform.workflow.list_apps()]

    @app.post("/api/apps/{app_id}/versions", response_model=VersionOut)
    async def submit_version(app_id: str, notebook: UploadFile, manifest: UploadFile,
                             user: UserRecord = Depends(current_user)):
        record = platform.workflow.get_app(app_id)
        require_owner_or_admin(user, record)
        version = platform.submit_version(
            app_id, await notebook.read(), await manifest.read(), actor=user.user_id, actor_roles=user.roles
        )
        return VersionOut(**version.to_doc())

    @app.get("/api/apps/{app_id}/versions", response_model=list[VersionOut])
    def version_history(app_id: str, user: UserRecord = Depends(current_user)):
        return [VersionOut(**v.to_doc()) for v in platform.workflow.version_history(app_id)]

    # --- review --------------------------------------------------------------

    @app.post("/api/versions/{version_id}/assign-reviewer", response_model=AssignReviewerOut)
    def assign_reviewer(version_id: str, body: AssignReviewerRequest,
                        user: UserRecord = Depends(current_user)):
        version = resolve_version(version_id)
        reviewer = platform.users.get(body.reviewer)
        if reviewer is None:
            raise NotFound(f"no user {body.reviewer!r}")
        platform.workflow.assign_reviewer(
            version.app_id, version.version_no, reviewer=reviewer.user_id,
            actor=user.user_id, reviewer_roles=reviewer.roles, actor_roles=user.roles,
        )
        preview = platform.deployments.preview_deploy(version, requested_by=user.user_id)
        return AssignReviewerOut(version=VersionOut(**version.to_doc()), preview_url=preview.url)

    @app.post("/api/versions/{version_id}/review", response_model=VersionOut)
    def record_review(version_id: str, body: ReviewRequest, user: UserRecord = Depends(current_user)):
        version = resolve_version(version_id)
        platform.record_review(
            version.app_id, version.version_no, reviewer=user.user_id, action=body.action, comment=body.comment
        )
        return VersionOut(**version.to_doc())

    @app.post("/api/versions/{version_id}/run", response_model=RunOut)
    def run_version(version_id: str, body: RunRequest, user: UserRecord = Depends(current_user)):
        version = resolve_version(version_id)
        record = platform.workflow.get_app(version.app_id)
        require_owner_or_admin(user, record)
        if body.purpose not in ("preview", "build_check"):
            raise BadInput(f"purpose must be preview or build_check, not {body.purpose!r}")
        result = platform.run_version(version, body.params, body.purpose)
        return run_out(result)

    # --- packages ---------------------------------------------------------------

    @app.post("/api/packages/requests", response_model=RegistryEntryOut)
    def request_package(body: PackageRequestBody, user: UserRecord = Depends(current_user)):
        entry = platform.registry.request_approval(
            body.ecosystem, body.name, requester=user.user_id, note=body.note
        )
        return RegistryEntryOut(**entry.to_doc())

    @app.post("/api/packages/{ecosystem}/{name}/decision", response_model=RegistryEntryOut)
    def decide_package(ecosystem: str, name: str, body: PackageDecisionBody,
                       user: UserRecord = Depends(current_user)):
        entry = platform.registry.decide_approval(
            ecosystem, name, body.decision, admin=user.user_id,
            allowed_versions=body.allowed_versions, admin_roles=user.roles,
        )
        return RegistryEntryOut(**entry.to_doc())

    @app.get("/api/registry")
    def list_registry(format: str = "json", user: UserRecord = Depends(current_user)):
        entries = platform.registry.snapshot()
        if format == "tsv":
            return PlainTextResponse(export_registry_tsv(entries))
        return [RegistryEntryOut(**e.to_doc()).model_dump() for e in sorted(
            entries, key=lambda e: (e.ecosystem, e.normalized_name)
        )]

    # --- audit ---------------------------------------------------------------------

    @app.get("/api/audit")
    def audit_export(request: Request, user: UserRecord = Depends(current_user)):
        from_seq = int(request.query_params.get("from", 0))
        lines = platform.audit.lines(from_seq=from_seq)
        return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""))

    # --- deployments ------------------------------------------------------------------

    @app.post("/api/deployments/{slug}/scale", response_model=DeploymentOut)
    def scale(slug: str, body: ScaleRequest, user: UserRecord = Depends(current_user)):
        dep = platform.deployments.scale(slug, body.replicas, actor=user.user_id, actor_roles=user.roles)
        return DeploymentOut(**{k: v for k, v in dep.to_doc().items() if k != "preview_token" and k != "instance_id"})

    @app.post("/api/deployments/{slug}/retire", response_model=DeploymentOut)
    def retire(slug: str, user: UserRecord = Depends(current_user)):
        dep = platform.deployments.retire(slug, actor=user.user_id, actor_roles=user.roles)
        return DeploymentOut(**{k: v for k, v in dep.to_doc().items() if k != "preview_token" and k != "instance_id"})

    @app.post("/api/apps/{app_id}/rollback", response_model=DeploymentOut)
    def rollback(app_id: str, body: RollbackRequest, user: UserRecord = Depends(current_user)):
        dep = platform.workflow.rollback_to(app_id, body.version_no, actor=user.user_id, actor_roles=user.roles)
        return DeploymentOut(**{k: v for k, v in dep.to_doc().items() if k != "preview_token" and k != "instance_id"})

    # --- app shell + runs ----------------------------------------------------------------

    @app.get("/internal/{slug}", response_model=AppShellOut)
    def internal_shell(slug: str, user: UserRecord = Depends(current_user)):
        version = platform.deployments.resolve(f"/internal/{slug}", user.user_id, user.roles)
        return shell_out(slug, version)

    @app.post("/internal/{slug}/run", response_model=RunOut)
    def internal_run(slug: str, body: RunRequest, user: UserRecord = Depends(current_user)):
        version = platform.deployments.resolve(f"/internal/{slug}", user.user_id, user.roles)
        result = platform.run_version(version, body.params, "live")
        return run_out(result)

    @app.get("/preview/{token}", response_model=AppShellOut)
    def preview_shell(token: str, user: UserRecord = Depends(current_user)):
        version = platform.deployments.resolve(f"/preview/{token}", user.user_id, user.roles)
        return shell_out(token, version)

    @app.post("/preview/{token}/run", response_model=RunOut)
    def preview_run(token: str, body: RunRequest, user: UserRecord = Depends(current_user)):
        version = platform.deployments.resolve(f"/preview/{token}", user.user_id, user.roles)
        result = platform.run_version(version, body.params, "preview")
        return run_out(result)

    return app
