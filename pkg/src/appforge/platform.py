"""Composition root: wires store, registry, workflow, sandbox, deployments.

Pipeline hooks live here: a submission that validates cleanly gets its build
check run immediately; an approval triggers deployment as the "system" actor,
mirroring the automatic progression of the upload -> sandbox -> review ->
deploy pipeline.
"""

from __future__ import annotations

from pathlib import Path

from .deploy.registry import DeploymentRegistry
from .errors import WrongState
from .notebooks import extract_app_config, generate_widget_schema, parse_notebook
from .persistence import Store
from .registry import PackageRegistry, PackageRegistryEntry
from .sandbox.orchestrator import Orchestrator, sample_values
from .sandbox.policy import SandboxPolicy
from .sandbox.wire import ExecutionResult
from .users import UserStore
from .workflow.audit import AuditLog
from .workflow.content import ContentStore
from .workflow.service import AppVersion, WorkflowService
from .workflow.states import LifecycleState

S = LifecycleState


class Platform:
    def __init__(
        self,
        data_dir: Path | str | None = None,
        base_url: str = "https://apps.department.gov",
        default_policy: SandboxPolicy | None = None,
        default_runner: dict | None = None,
    ):
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir is not None:
            self.store = Store(self.data_dir / "appforge.wal")
            self.content = ContentStore(self.data_dir / "blobs")
        else:
            self.store = Store()
            self.content = ContentStore()
        self.audit = AuditLog(persist=self.store.commit)
        self.users = UserStore(self.store)
        self.registry = PackageRegistry(journal=self._registry_journal)
        self.workflow = WorkflowService(self.store, self.content, self.audit, self.registry)
        self.deployments = DeploymentRegistry(self.workflow, base_url=base_url)
        self.workflow.deployments = self.deployments
        self.orchestrator = Orchestrator(self.workflow, default_policy=default_policy, default_runner=default_runner)

    # --- registry persistence glue -------------------------------------------

    def _registry_journal(self, puts: list, audit_info: dict | None) -> None:
        batch = list(puts)
        if audit_info is not None:
            self.audit.append(actor=audit_info["actor"], action=audit_info["action"], batch=batch)
        self.store.commit(batch)

    # --- pipeline ---------------------------------------------------------------

    def submit_version(self, app_id: str, notebook: bytes, manifest: bytes, actor: str, actor_roles=("author",)) -> AppVersion:
        version = self.workflow.submit_version(app_id, notebook, manifest, actor, actor_roles)
        if version.state is S.VALIDATED:
            self.run_build_check(version)
        return version

    def run_build_check(self, version: AppVersion) -> ExecutionResult:
        cfg = extract_app_config(parse_notebook(self.content.get(version.notebook_ref)))
        request = self.orchestrator.build_execution_request(version, sample_values(cfg), "build_check")
        return self.orchestrator.dispatch(request)

    def record_review(self, app_id: str, version_no: int, reviewer: str, action: str, comment: str = "") -> AppVersion:
        state = self.workflow.record_review(app_id, version_no, reviewer, action, comment)
        version = self.workflow.get_version(app_id, version_no)
        if state is S.APPROVED:
            self.deployments.deploy(version, actor="system")
        return version

    def run_version(self, version: AppVersion, params: dict, purpose: str) -> ExecutionResult:
        if purpose == "build_check" and version.state is not S.VALIDATED:
            raise WrongState(f"build checks run from Validated, not {version.state.value}")
        request = self.orchestrator.build_execution_request(version, params, purpose)
        return self.orchestrator.dispatch(request)

    def widget_schema_for(self, version: AppVersion) -> bytes:
        cfg = extract_app_config(parse_notebook(self.content.get(version.notebook_ref)))
        return generate_widget_schema(cfg).to_bytes()

    # --- recovery -----------------------------------------------------------------

    @classmethod
    def recover(cls, data_dir: Path | str, **kwargs) -> "Platform":
        platform = cls.__new__(cls)
        platform.data_dir = Path(data_dir)
        platform.store = Store.recover(platform.data_dir / "appforge.wal")
        platform.content = ContentStore(platform.data_dir / "blobs")
        audit_docs = sorted(platform.store.scan("audit").items())
        platform.audit = AuditLog.restore([doc["line"] for _, doc in audit_docs], persist=platform.store.commit)
        platform.users = UserStore(platform.store)
        platform.users.load_from_store()
        platform.registry = PackageRegistry(journal=platform._registry_journal)
        for key, doc in platform.store.scan("registry").items():
            platform.registry._entries[tuple(key.split(":", 1))] = PackageRegistryEntry.from_doc(doc)
        for _, doc in sorted(platform.store.scan("registry_history").items()):
            platform.registry._history.append(PackageRegistryEntry.from_doc(doc))
        platform.workflow = WorkflowService(platform.store, platform.content, platform.audit, platform.registry)
        platform.workflow.load_from_store()
        platform.deployments = DeploymentRegistry(
            platform.workflow, base_url=kwargs.get("base_url", "https://apps.department.gov")
        )
        platform.deployments.load_from_store()
        platform.workflow.deployments = platform.deployments
        platform.orchestrator = Orchestrator(
            platform.workflow,
            default_policy=kwargs.get("default_policy"),
            default_runner=kwargs.get("default_runner"),
        )
        return platform

    def close(self) -> None:
        self.store.close()
