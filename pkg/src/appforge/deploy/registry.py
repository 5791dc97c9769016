"""Deployment registry: slug -> live version bindings, previews, resolution.

A slug has at most one active non-preview deployment; its URL never changes
across redeploys and rollbacks. Previews are capability URLs: a 128-bit
token, visible only to the version's author and assigned reviewer, and
retired automatically when the version leaves review.
"""

from __future__ import annotations

import secrets
import threading
import uuid
from dataclasses import dataclass

from ..canonical import utc_now
from ..errors import BadInput, Forbidden, NotFound, Unauthenticated, UnknownSlug, WrongState
from ..workflow.service import AppVersion, WorkflowService
from ..workflow.states import LifecycleState
from .slugs import make_slug

S = LifecycleState


@dataclass
class Deployment:
    slug: str
    app_id: str
    version_no: int
    url: str
    replicas: int = 1
    status: str = "active"
    preview_token: str | None = None
    instance_id: str = ""
    created_at: str = ""

    def to_doc(self) -> dict:
        return {
            "slug": self.slug,
            "app_id": self.app_id,
            "version_no": self.version_no,
            "url": self.url,
            "replicas": self.replicas,
            "status": self.status,
            "preview_token": self.preview_token,
            "instance_id": self.instance_id,
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Deployment":
        return cls(**doc)


class DeploymentRegistry:
    def __init__(self, workflow: WorkflowService, base_url: str = "https://apps.department.gov"):
        self.workflow = workflow
        self.base_url = base_url.rstrip("/")
        self.deployments: dict[str, Deployment] = {}      # slug -> active/retired deployment
        self.previews: dict[str, Deployment] = {}         # token -> preview deployment
        self._lock = threading.Lock()

    # --- deploy ------------------------------------------------------------

    def stable_url(self, slug: str) -> str:
        return f"{self.base_url}/internal/{slug}"

    def deploy(self, version: AppVersion, actor: str, actor_roles=("admin",)) -> Deployment:
        if actor != "system" and "admin" not in actor_roles:
            raise Forbidden("only the post-approval hook or an admin may deploy")
        if version.state is not S.APPROVED:
            raise WrongState(f"version is {version.state.value}, not Approved")
        return self._activate(version, actor, transition_event="deploy")

    def repoint(self, app_id: str, target: AppVersion, actor: str) -> Deployment:
        """Rollback: repoint the app's slug at a previously approved version."""
        app = self.workflow.get_app(app_id)
        current = self.deployments.get(app.slug) if app.slug else None
        if current is not None and current.status == "active" and current.version_no == target.version_no:
            self.workflow.audit.append(actor=actor, action="rollback", app_id=app_id, version_no=target.version_no)
            return current
        event = "rollback" if target.state is not S.APPROVED else "deploy"
        return self._activate(target, actor, transition_event=event)

    def _activate(self, version: AppVersion, actor: str, transition_event: str) -> Deployment:
        app = self.workflow.get_app(version.app_id)
        with self._lock:
            if app.slug is None:
                app.slug = make_slug(app.title, set(self.deployments))
                self.workflow.store.commit([("apps", app.app_id, app.to_doc())])
            slug = app.slug
            previous = self.deployments.get(slug)
            if previous is not None and previous.status == "active":
                previous.status = "superseded"
                prev_version = self.workflow.get_version(previous.app_id, previous.version_no)
                if prev_version.state is S.DEPLOYED:
                    self.workflow.transition(
                        prev_version, "supersede", actor=actor,
                        extra_puts=[("deployments", slug, previous.to_doc())],
                    )
                else:
                    self.workflow.store.commit([("deployments", slug, previous.to_doc())])
            deployment = Deployment(
                slug=slug,
                app_id=version.app_id,
                version_no=version.version_no,
                url=self.stable_url(slug),
                instance_id=uuid.uuid4().hex,
                created_at=utc_now(),
            )
            self.deployments[slug] = deployment
            self.workflow.transition(
                version, transition_event, actor=actor,
                extra_puts=[("deployments", slug, deployment.to_doc())],
            )
            return deployment

    # --- previews -------------------------------------------------------------

    def preview_deploy(self, version: AppVersion, requested_by: str) -> Deployment:
        if version.state not in (S.SANDBOX_PASSED, S.IN_REVIEW):
            raise WrongState(f"cannot preview a version in state {version.state.value}")
        token = secrets.token_hex(16)
        deployment = Deployment(
            slug=f"preview-{token[:8]}",
            app_id=version.app_id,
            version_no=version.version_no,
            url=f"{self.base_url}/preview/{token}",
            preview_token=token,
            instance_id=uuid.uuid4().hex,
            created_at=utc_now(),
        )
        with self._lock:
            self.previews[token] = deployment
            batch = [("previews", token, deployment.to_doc())]
            self.workflow.audit.append(
                actor=requested_by, action="preview_deploy",
                app_id=version.app_id, version_no=version.version_no, batch=batch,
            )
            self.workflow.store.commit(batch)
        return deployment

    def retire_previews_for(self, app_id: str, version_no: int) -> None:
        with self._lock:
            for token, dep in list(self.previews.items()):
                if dep.app_id == app_id and dep.version_no == version_no and dep.status == "active":
                    dep.status = "retired"
                    batch = [("previews", token, dep.to_doc())]
                    self.workflow.audit.append(
                        actor="system", action="preview_retire",
                        app_id=app_id, version_no=version_no, batch=batch,
                    )
                    self.workflow.store.commit(batch)

    # --- operations -------------------------------------------------------------

    def _active(self, slug: str) -> Deployment:
        dep = self.deployments.get(slug)
        if dep is None or dep.status != "active":
            raise UnknownSlug(f"no active deployment at {slug!r}")
        return dep

    def scale(self, slug: str, replicas: int, actor: str, actor_roles=()) -> Deployment:
        if "admin" not in actor_roles:
            raise Forbidden("scaling requires the admin role")
        if not isinstance(replicas, int) or replicas < 1:
            raise BadInput("replicas must be a positive integer")
        dep = self._active(slug)
        dep.replicas = replicas
        batch = [("deployments", slug, dep.to_doc())]
        self.workflow.audit.append(actor=actor, action="scale", app_id=dep.app_id, version_no=dep.version_no, batch=batch)
        self.workflow.store.commit(batch)
        return dep

    def retire(self, slug: str, actor: str, actor_roles=()) -> Deployment:
        dep = self._active(slug)
        app = self.workflow.get_app(dep.app_id)
        if actor != app.owner and "admin" not in actor_roles:
            raise Forbidden("retiring requires the app owner or an admin")
        version = self.workflow.get_version(dep.app_id, dep.version_no)
        dep.status = "retired"
        self.workflow.transition(
            version, "retire", actor=actor, extra_puts=[("deployments", slug, dep.to_doc())]
        )
        return dep

    # --- resolution ---------------------------------------------------------------

    def resolve(self, path: str, user: str | None, user_roles=()) -> AppVersion:
        """Map /internal/{slug} or /preview/{token} to the version it serves."""
        if user is None:
            raise Unauthenticated("authentication required")
        if path.startswith("/internal/"):
            slug = path[len("/internal/"):].strip("/")
            dep = self._active(slug)
            return self.workflow.get_version(dep.app_id, dep.version_no)
        if path.startswith("/preview/"):
            token = path[len("/preview/"):].strip("/")
            dep = self.previews.get(token)
            if dep is None or dep.status != "active":
                raise NotFound("unknown or retired preview link")
            version = self.workflow.get_version(dep.app_id, dep.version_no)
            allowed = {version.submitted_by, version.assigned_reviewer}
            if user not in allowed:
                raise Forbidden("preview links are visible to the author and assigned reviewer only")
            return version
        raise NotFound(f"unroutable path {path!r}")

    # --- recovery --------------------------------------------------------------------

    def load_from_store(self) -> None:
        self.deployments = {k: Deployment.from_doc(d) for k, d in self.workflow.store.scan("deployments").items()}
        self.previews = {k: Deployment.from_doc(d) for k, d in self.workflow.store.scan("previews").items()}
