// Typed client for the appforge HTTP API.
//
// Every request is funneled through request(), which refuses any
// (method, path template) pair that is not in DOCUMENTED_ENDPOINTS — the
// portal cannot drift onto undocumented surface, and the contract test
// checks the funnel.

import type {
  AppRecord,
  AppShell,
  AssignReviewerResponse,
  DeploymentRecord,
  RegistryEntry,
  RunResult,
  VersionRecord,
} from "./types.js";

export const DOCUMENTED_ENDPOINTS: ReadonlyArray<readonly [string, string]> = [
  ["POST", "/api/apps"],
  ["GET", "/api/apps"],
  ["POST", "/api/apps/{app_id}/versions"],
  ["GET", "/api/apps/{app_id}/versions"],
  ["POST", "/api/versions/{version_id}/assign-reviewer"],
  ["POST", "/api/versions/{version_id}/review"],
  ["POST", "/api/versions/{version_id}/run"],
  ["POST", "/api/packages/requests"],
  ["POST", "/api/packages/{ecosystem}/{name}/decision"],
  ["GET", "/api/registry"],
  ["GET", "/api/audit"],
  ["POST", "/api/deployments/{slug}/scale"],
  ["POST", "/api/deployments/{slug}/retire"],
  ["POST", "/api/apps/{app_id}/rollback"],
  ["GET", "/internal/{slug}"],
  ["POST", "/internal/{slug}/run"],
  ["GET", "/preview/{token}"],
  ["POST", "/preview/{token}/run"],
];

const DOCUMENTED = new Set(DOCUMENTED_ENDPOINTS.map(([m, p]) => `${m} ${p}`));

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    detail: string,
  ) {
    super(detail);
  }
}

export type RequestLogEntry = { method: string; template: string; path: string };

export interface ApiClientOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  readonly baseUrl: string;
  token: string;
  readonly log: RequestLogEntry[] = [];
  private readonly fetchImpl: typeof fetch;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token ?? "";
    this.fetchImpl = options.fetchImpl ?? fetch.bind(globalThis);
  }

  private async request<T>(
    method: string,
    template: string,
    subst: Record<string, string> = {},
    body?: unknown,
    query?: Record<string, string>,
  ): Promise<T> {
    const key = `${method} ${template}`;
    if (!DOCUMENTED.has(key)) {
      throw new Error(`undocumented endpoint: ${key}`);
    }
    let path = template;
    for (const [name, value] of Object.entries(subst)) {
      path = path.replace(`{${name}}`, encodeURIComponent(value));
    }
    if (path.includes("{")) {
      throw new Error(`unsubstituted path parameter in ${path}`);
    }
    this.log.push({ method, template, path });

    const headers: Record<string, string> = { authorization: `Bearer ${this.token}` };
    let payload: BodyInit | undefined;
    if (body instanceof FormData) {
      payload = body;
    } else if (body !== undefined) {
      headers["content-type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const qs = query ? `?${new URLSearchParams(query)}` : "";
    const response = await this.fetchImpl(`${this.baseUrl}${path}${qs}`, {
      method,
      headers,
      body: payload,
    });
    const text = await response.text();
    if (!response.ok) {
      let errorName = "HttpError";
      let detail = text;
      try {
        const doc = JSON.parse(text);
        errorName = doc.error ?? errorName;
        detail = doc.detail ?? detail;
      } catch {
        // non-JSON error body; keep raw text
      }
      throw new ApiRequestError(response.status, errorName, detail);
    }
    if (response.headers.get("content-type")?.includes("json")) {
      return JSON.parse(text) as T;
    }
    return text as unknown as T;
  }

  // applications
  createApp(title: string, description = "", ecosystem = "pypi"): Promise<AppRecord> {
    return this.request("POST", "/api/apps", {}, { title, description, ecosystem });
  }

  listApps(): Promise<AppRecord[]> {
    return this.request("GET", "/api/apps");
  }

  submitVersion(appId: string, notebook: Blob, manifest: Blob): Promise<VersionRecord> {
    const form = new FormData();
    form.append("notebook", notebook, "notebook.ipynb");
    form.append("manifest", manifest, "requirements.txt");
    return this.request("POST", "/api/apps/{app_id}/versions", { app_id: appId }, form);
  }

  listVersions(appId: string): Promise<VersionRecord[]> {
    return this.request("GET", "/api/apps/{app_id}/versions", { app_id: appId });
  }

  // review
  assignReviewer(appId: string, versionNo: number, reviewer: string): Promise<AssignReviewerResponse> {
    return this.request(
      "POST",
      "/api/versions/{version_id}/assign-reviewer",
      { version_id: `${appId}:${versionNo}` },
      { reviewer },
    );
  }

  review(appId: string, versionNo: number, action: string, comment = ""): Promise<VersionRecord> {
    return this.request(
      "POST",
      "/api/versions/{version_id}/review",
      { version_id: `${appId}:${versionNo}` },
      { action, comment },
    );
  }

  runVersion(appId: string, versionNo: number, params: Record<string, unknown>): Promise<RunResult> {
    return this.request(
      "POST",
      "/api/versions/{version_id}/run",
      { version_id: `${appId}:${versionNo}` },
      { params, purpose: "preview" },
    );
  }

  // registry
  requestPackage(ecosystem: string, name: string, note = ""): Promise<RegistryEntry> {
    return this.request("POST", "/api/packages/requests", {}, { ecosystem, name, note });
  }

  decidePackage(ecosystem: string, name: string, decision: string, allowedVersions = "any"): Promise<RegistryEntry> {
    return this.request(
      "POST",
      "/api/packages/{ecosystem}/{name}/decision",
      { ecosystem, name },
      { decision, allowed_versions: allowedVersions },
    );
  }

  listRegistry(): Promise<RegistryEntry[]> {
    return this.request("GET", "/api/registry");
  }

  // audit
  auditExport(fromSeq = 0): Promise<string> {
    return this.request("GET", "/api/audit", {}, undefined, { from: String(fromSeq) });
  }

  // deployments
  scale(slug: string, replicas: number): Promise<DeploymentRecord> {
    return this.request("POST", "/api/deployments/{slug}/scale", { slug }, { replicas });
  }

  retire(slug: string): Promise<DeploymentRecord> {
    return this.request("POST", "/api/deployments/{slug}/retire", { slug });
  }

  rollback(appId: string, versionNo: number): Promise<DeploymentRecord> {
    return this.request("POST", "/api/apps/{app_id}/rollback", { app_id: appId }, { version_no: versionNo });
  }

  // app shells and runs
  appShell(slug: string): Promise<AppShell> {
    return this.request("GET", "/internal/{slug}", { slug });
  }

  runApp(slug: string, params: Record<string, unknown>): Promise<RunResult> {
    return this.request("POST", "/internal/{slug}/run", { slug }, { params });
  }

  previewShell(token: string): Promise<AppShell> {
    return this.request("GET", "/preview/{token}", { token });
  }

  previewRun(token: string, params: Record<string, unknown>): Promise<RunResult> {
    return this.request("POST", "/preview/{token}/run", { token }, { params });
  }
}
