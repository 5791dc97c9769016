"""Application/version lifecycle service.

All state changes for one app run under that app's lock; the audit log has a
single global appender. Every state change commits together with its audit
event in one batch, so a crash never separates the two. A StorageError from
the store is fatal for the process — recovery happens by reloading the WAL.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from ..canonical import utc_now
from ..errors import (
    BadInput,
    Forbidden,
    NeverApproved,
    NotAssignedReviewer,
    SelfReview,
    UnknownApp,
    UnknownVersion,
    WrongState,
)
from ..notebooks import extract_app_config, parse_notebook, validate_app_config
from ..persistence import Store
from ..registry import PackageRegistry, parse_manifest, validate_manifest
from ..reports import ValidationReport
from .audit import AuditLog
from .content import ContentStore, content_hash
from .states import LifecycleState, next_state

S = LifecycleState

REVIEW_ACTIONS = ("approve", "request_changes", "reject")


@dataclass
class Application:
    app_id: str
    title: str
    owner: str
    ecosystem: str = "pypi"
    description: str = ""
    slug: str | None = None
    created_at: str = ""

    def to_doc(self) -> dict:
        return {
            "app_id": self.app_id,
            "title": self.title,
            "owner": self.owner,
            "ecosystem": self.ecosystem,
            "description": self.description,
            "slug": self.slug,
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Application":
        return cls(**doc)


@dataclass
class ReviewRecord:
    reviewer: str
    action: str
    comment: str
    at: str

    def to_doc(self) -> dict:
        return {"reviewer": self.reviewer, "action": self.action, "comment": self.comment, "at": self.at}


@dataclass
class AppVersion:
    app_id: str
    version_no: int
    content_hash: str
    notebook_ref: str
    manifest_ref: str
    state: LifecycleState
    submitted_by: str
    submitted_at: str
    reports: dict = field(default_factory=dict)
    assigned_reviewer: str | None = None
    reviews: list[ReviewRecord] = field(default_factory=list)
    last_result_id: str | None = None

    @property
    def ref(self) -> str:
        return f"{self.app_id}:{self.version_no}"

    def to_doc(self) -> dict:
        return {
            "app_id": self.app_id,
            "version_no": self.version_no,
            "content_hash": self.content_hash,
            "notebook_ref": self.notebook_ref,
            "manifest_ref": self.manifest_ref,
            "state": self.state.value,
            "submitted_by": self.submitted_by,
            "submitted_at": self.submitted_at,
            "reports": self.reports,
            "assigned_reviewer": self.assigned_reviewer,
            "reviews": [r.to_doc() for r in self.reviews],
            "last_result_id": self.last_result_id,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "AppVersion":
        doc = dict(doc)
        doc["state"] = LifecycleState(doc["state"])
        doc["reviews"] = [ReviewRecord(**r) for r in doc.get("reviews", [])]
        return cls(**doc)


class WorkflowService:
    def __init__(self, store: Store, content: ContentStore, audit: AuditLog, registry: PackageRegistry):
        self.store = store
        self.content = content
        self.audit = audit
        self.registry = registry
        self.apps: dict[str, Application] = {}
        self.versions: dict[str, AppVersion] = {}
        self.notifications: list[dict] = []
        self.deployments = None  # set by the platform; used for rollback + preview retirement
        self._locks: dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()

    # --- plumbing --------------------------------------------------------

    def _lock(self, app_id: str) -> threading.RLock:
        with self._locks_guard:
            return self._locks.setdefault(app_id, threading.RLock())

    def _audit_put(self, batch: list, **kw) -> None:
        self.audit.append(batch=batch, **kw)

    def get_app(self, app_id: str) -> Application:
        try:
            return self.apps[app_id]
        except KeyError:
            raise UnknownApp(f"no application {app_id!r}") from None

    def get_version(self, app_id: str, version_no: int) -> AppVersion:
        try:
            return self.versions[f"{app_id}:{version_no}"]
        except KeyError:
            raise UnknownVersion(f"no version {version_no} of {app_id}") from None

    def resolve_ref(self, ref: str) -> AppVersion:
        app_id, _, no = ref.rpartition(":")
        if not app_id or not no.isdigit():
            raise UnknownVersion(f"bad version ref {ref!r}")
        return self.get_version(app_id, int(no))

    # --- applications ----------------------------------------------------

    def create_app(self, title: str, owner: str, ecosystem: str = "pypi", description: str = "") -> Application:
        if not title.strip():
            raise BadInput("application title must be non-empty")
        app = Application(
            app_id=f"app-{uuid.uuid4().hex[:12]}",
            title=title,
            owner=owner,
            ecosystem=ecosystem,
            description=description,
            created_at=utc_now(),
        )
        batch = [("apps", app.app_id, app.to_doc())]
        self._audit_put(batch, actor=owner, action="app_create", app_id=app.app_id)
        self.store.commit(batch)
        self.apps[app.app_id] = app
        return app

    def list_apps(self) -> list[Application]:
        return sorted(self.apps.values(), key=lambda a: a.created_at)

    # --- submission ------------------------------------------------------

    def submit_version(self, app_id: str, notebook: bytes, manifest: bytes, actor: str, actor_roles=("author",)) -> AppVersion:
        app = self.get_app(app_id)
        if actor != app.owner and "admin" not in actor_roles:
            raise Forbidden(f"{actor} does not own {app_id}")
        with self._lock(app_id):
            notebook_ref = self.content.put(notebook)
            manifest_ref = self.content.put(manifest)
            version = AppVersion(
                app_id=app_id,
                version_no=len(self.version_history(app_id)) + 1,
                content_hash=content_hash(notebook, manifest),
                notebook_ref=notebook_ref,
                manifest_ref=manifest_ref,
                state=S.SUBMITTED,
                submitted_by=actor,
                submitted_at=utc_now(),
            )
            batch = [("versions", version.ref, version.to_doc())]
            self._audit_put(
                batch, actor=actor, action="submit", app_id=app_id,
                version_no=version.version_no, next_state=S.SUBMITTED.value,
            )
            self.store.commit(batch)
            self.versions[version.ref] = version

            reports = self._validate_submission(app, notebook, manifest)
            version.reports = reports
            ok = (
                not reports["errors"]
                and reports["manifest"] is not None and reports["manifest"]["status"] == "pass"
                and reports["config"] is not None and reports["config"]["status"] == "pass"
            )
            self.transition(version, "validate" if ok else "validation_fail", actor="system")
            return version

    def _validate_submission(self, app: Application, notebook: bytes, manifest: bytes) -> dict:
        errors: list[dict] = []
        manifest_doc = config_doc = None
        try:
            parsed = parse_manifest(manifest, app.ecosystem)
            manifest_doc = validate_manifest(parsed, self.registry.snapshot()).to_doc()
        except BadInput as exc:
            errors.append({"stage": "manifest", "reason": str(exc)})
        try:
            cfg = extract_app_config(parse_notebook(notebook))
            config_doc = validate_app_config(cfg).to_doc()
        except BadInput as exc:
            errors.append({"stage": "notebook", "reason": str(exc)})
        return {"manifest": manifest_doc, "config": config_doc, "errors": errors}

    def manifest_report(self, version: AppVersion) -> ValidationReport | None:
        doc = version.reports.get("manifest")
        return ValidationReport.from_doc(doc) if doc else None

    # --- state machine ---------------------------------------------------

    def transition(self, version: AppVersion, event: str, actor: str, extra_puts: list | None = None) -> LifecycleState:
        """Apply one legal state-machine event and commit it with its audit event.

        extra_puts lets a caller ride companion rows (deployment bindings) in
        the same atomic batch as the state change.
        """
        with self._lock(version.app_id):
            prev = version.state
            new = next_state(prev, event)
            version.state = new
            batch = [("versions", version.ref, version.to_doc())] + list(extra_puts or [])
            self._audit_put(
                batch, actor=actor, action=event, app_id=version.app_id,
                version_no=version.version_no, prev_state=prev.value, next_state=new.value,
            )
            self.store.commit(batch)
        if prev is S.IN_REVIEW and self.deployments is not None:
            self.deployments.retire_previews_for(version.app_id, version.version_no)
        return new

    # --- review ----------------------------------------------------------

    def assign_reviewer(self, app_id: str, version_no: int, reviewer: str, actor: str,
                        reviewer_roles=("reviewer",), actor_roles=("author",)) -> AppVersion:
        app = self.get_app(app_id)
        version = self.get_version(app_id, version_no)
        if actor != app.owner and "admin" not in actor_roles:
            raise Forbidden(f"{actor} may not assign reviewers for {app_id}")
        if version.state is not S.SANDBOX_PASSED:
            raise WrongState(f"cannot assign a reviewer while {version.state.value}")
        if reviewer == version.submitted_by:
            raise SelfReview("author cannot review their own version")
        if "reviewer" not in reviewer_roles:
            raise Forbidden(f"{reviewer} lacks the reviewer role")
        with self._lock(app_id):
            version.assigned_reviewer = reviewer
            self.transition(version, "assign_reviewer", actor=actor)
            self.notifications.append(
                {"to": reviewer, "app_id": app_id, "version_no": version_no, "at": utc_now()}
            )
        return version

    def record_review(self, app_id: str, version_no: int, reviewer: str, action: str, comment: str = "") -> LifecycleState:
        version = self.get_version(app_id, version_no)
        if version.state is not S.IN_REVIEW:
            raise WrongState(f"version is {version.state.value}, not InReview")
        if reviewer != version.assigned_reviewer:
            raise NotAssignedReviewer(f"{reviewer} is not the assigned reviewer")
        if action not in REVIEW_ACTIONS:
            raise BadInput(f"unknown review action {action!r}")
        with self._lock(app_id):
            version.reviews.append(ReviewRecord(reviewer=reviewer, action=action, comment=comment, at=utc_now()))
            return self.transition(version, action, actor=reviewer)

    # --- history / rollback ------------------------------------------------

    def version_history(self, app_id: str) -> list[AppVersion]:
        self.get_app(app_id)
        versions = [v for v in self.versions.values() if v.app_id == app_id]
        return sorted(versions, key=lambda v: v.version_no)

    def rollback_to(self, app_id: str, version_no: int, actor: str, actor_roles=("author",)):
        app = self.get_app(app_id)
        if actor != app.owner and "admin" not in actor_roles:
            raise Forbidden(f"{actor} may not roll back {app_id}")
        target = self.get_version(app_id, version_no)
        if target.state not in (S.APPROVED, S.DEPLOYED, S.SUPERSEDED):
            raise NeverApproved(f"version {version_no} was never approved or deployed")
        if self.deployments is None:
            raise WrongState("no deployment registry attached")
        return self.deployments.repoint(app_id, target, actor)

    # --- audit-log replay ---------------------------------------------------

    def states_from_audit(self) -> dict[str, str]:
        """Final state of every version according to the audit log alone."""
        final: dict[str, str] = {}
        for event in self.audit.events:
            if event.app_id and event.version_no and event.next_state:
                final[f"{event.app_id}:{event.version_no}"] = event.next_state
        return final

    # --- recovery ----------------------------------------------------------

    def load_from_store(self) -> None:
        self.apps = {k: Application.from_doc(d) for k, d in self.store.scan("apps").items()}
        self.versions = {k: AppVersion.from_doc(d) for k, d in self.store.scan("versions").items()}
