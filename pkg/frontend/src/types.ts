// API response shapes, mirroring the server's documented wire formats.

export interface AppRecord {
  app_id: string;
  title: string;
  owner: string;
  ecosystem: string;
  description: string;
  slug: string | null;
  created_at: string;
  latest_version_no: number | null;
  latest_state: string | null;
}

export interface Violation {
  name: string;
  kind: string;
  detail: string;
}

export interface ValidationReport {
  status: "pass" | "fail";
  violations: Violation[];
}

export interface SubmissionReports {
  manifest: ValidationReport | null;
  config: ValidationReport | null;
  errors: { stage: string; reason: string }[];
}

export interface ReviewRecord {
  reviewer: string;
  action: string;
  comment: string;
  at: string;
}

export interface VersionRecord {
  app_id: string;
  version_no: number;
  state: string;
  content_hash: string;
  submitted_by: string;
  submitted_at: string;
  reports: SubmissionReports;
  assigned_reviewer: string | null;
  reviews: ReviewRecord[];
  last_result_id: string | null;
}

export interface AssignReviewerResponse {
  version: VersionRecord;
  preview_url: string;
}

export interface WidgetControl {
  name: string;
  widget: "text" | "dropdown" | "slider" | "file";
  label: string;
  default?: string | number;
  choices?: string[];
  min?: number;
  max?: number;
  step?: number;
  accept?: string[];
}

export interface WidgetSchema {
  app_title: string;
  controls: WidgetControl[];
  schema_version: number;
}

export interface AppShell {
  slug: string;
  app_id: string;
  version_no: number;
  title: string;
  schema: WidgetSchema;
  schema_canonical: string;
}

export interface RunOutput {
  source_cell_index: number;
  mime_kind: "text" | "html" | "image_png" | "table" | "file";
  payload_ref: string;
  payload_text: string | null;
  payload_b64: string | null;
}

export interface RunResult {
  request_id: string;
  status: "success" | "error" | "policy_violation" | "timeout";
  outputs: RunOutput[];
  violations: { kind: string; detail: string }[];
  log: string;
  wall_seconds: number;
}

export interface RegistryEntry {
  ecosystem: string;
  normalized_name: string;
  allowed_versions: string;
  status: "approved" | "pending" | "rejected";
  requested_by: string | null;
  decided_by: string | null;
  note: string;
  created_at: string;
  decided_at: string | null;
}

export interface DeploymentRecord {
  slug: string;
  app_id: string;
  version_no: number;
  url: string;
  replicas: number;
  status: string;
  created_at: string;
}

export interface ApiError {
  error: string;
  detail: string;
}
