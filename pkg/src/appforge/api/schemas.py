"""Request and response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class CreateAppRequest(BaseModel):
    title: str
    description: str = ""
    ecosystem: str = "pypi"


class AppOut(BaseModel):
    app_id: str
    title: str
    owner: str
    ecosystem: str
    description: str = ""
    slug: str | None = None
    created_at: str
    latest_version_no: int | None = None
    latest_state: str | None = None


class ViolationOut(BaseModel):
    name: str
    kind: str
    detail: str


class ReportOut(BaseModel):
    status: str
    violations: list[ViolationOut] = Field(default_factory=list)


class ReviewOut(BaseModel):
    reviewer: str
    action: str
    comment: str
    at: str


class VersionOut(BaseModel):
    app_id: str
    version_no: int
    state: str
    content_hash: str
    submitted_by: str
    submitted_at: str
    reports: dict
    assigned_reviewer: str | None = None
    reviews: list[ReviewOut] = Field(default_factory=list)
    last_result_id: str | None = None


class AssignReviewerRequest(BaseModel):
    reviewer: str


class AssignReviewerOut(BaseModel):
    version: VersionOut
    preview_url: str


class ReviewRequest(BaseModel):
    action: str
    comment: str = ""


class RunRequest(BaseModel):
    params: dict = Field(default_factory=dict)
    purpose: str = "preview"


class OutputOut(BaseModel):
    source_cell_index: int
    mime_kind: str
    payload_ref: str
    payload_text: str | None = None
    payload_b64: str | None = None


class RunOut(BaseModel):
    request_id: str
    status: str
    outputs: list[OutputOut] = Field(default_factory=list)
    violations: list[dict] = Field(default_factory=list)
    log: str
    wall_seconds: float


class PackageRequestBody(BaseModel):
    ecosystem: str
    name: str
    note: str = ""


class PackageDecisionBody(BaseModel):
    decision: str
    allowed_versions: str = "any"


class RegistryEntryOut(BaseModel):
    ecosystem: str
    normalized_name: str
    allowed_versions: str
    status: str
    requested_by: str | None = None
    decided_by: str | None = None
    note: str = ""
    created_at: str = ""
    decided_at: str | None = None


class ScaleRequest(BaseModel):
    replicas: int


class RollbackRequest(BaseModel):
    version_no: int


class DeploymentOut(BaseModel):
    slug: str
    app_id: str
    version_no: int
    url: str
    replicas: int
    status: str
    created_at: str


class AppShellOut(BaseModel):
    slug: str
    app_id: str
    version_no: int
    title: str
    schema_doc: dict = Field(alias="schema")
    schema_canonical: str

    model_config = {"populate_by_name": True}
