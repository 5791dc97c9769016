// Portal views. The server is the single source of truth: every view renders
// API responses verbatim and re-fetches after mutations.

import { ApiClient, ApiRequestError } from "./api.js";
import { verifyAuditLines } from "./audit.js";
import type { RunResult, SubmissionReports, VersionRecord } from "./types.js";
import { readValues, renderControls } from "./widgets.js";

export interface Session {
  client: ApiClient;
  userId: string;
  roles: string[];
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  props: Partial<HTMLElementTagNameMap[K]> & { className?: string } = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  Object.assign(node, props);
  if (text !== undefined) node.textContent = text;
  return node;
}

export function stateBadge(doc: Document, state: string): HTMLElement {
  const badge = el(doc, "span", { className: `badge badge-${state.toLowerCase()}` }, state);
  badge.dataset.state = state;
  return badge;
}

function errorBox(doc: Document, error: unknown): HTMLElement {
  if (error instanceof ApiRequestError) {
    return el(doc, "div", { className: "error-box" }, `${error.status} ${error.errorName}: ${error.message}`);
  }
  return el(doc, "div", { className: "error-box" }, String(error));
}

function reportList(doc: Document, reports: SubmissionReports): HTMLElement {
  const box = el(doc, "div", { className: "report" });
  for (const report of [reports.manifest, reports.config]) {
    if (!report) continue;
    for (const violation of report.violations) {
      box.appendChild(
        el(doc, "div", { className: "violation" }, `${violation.name}: ${violation.kind} — ${violation.detail}`),
      );
    }
  }
  for (const err of reports.errors) {
    box.appendChild(el(doc, "div", { className: "violation" }, `${err.stage}: ${err.reason}`));
  }
  if (!box.childNodes.length) {
    box.appendChild(el(doc, "div", { className: "ok" }, "validation passed"));
  }
  return box;
}

// --- Upload ------------------------------------------------------------------

export function uploadView(session: Session, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  container.appendChild(el(doc, "h2", {}, "Upload a notebook"));

  const form = el(doc, "form", { id: "upload-form" });
  const appInput = el(doc, "input", { id: "upload-app", placeholder: "app id (blank = new app)" });
  const titleInput = el(doc, "input", { id: "upload-title", placeholder: "title for a new app" });
  const notebookInput = el(doc, "input", { type: "file", id: "upload-notebook" });
  const manifestInput = el(doc, "input", { type: "file", id: "upload-manifest" });
  const submit = el(doc, "button", { type: "submit" }, "Submit for validation");
  form.append(
    appInput, titleInput,
    el(doc, "label", {}, "notebook"), notebookInput,
    el(doc, "label", {}, "manifest"), manifestInput,
    submit,
  );
  const outcome = el(doc, "div", { id: "upload-outcome" });
  container.append(form, outcome);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      outcome.replaceChildren();
      try {
        let appId = appInput.value.trim();
        if (!appId) {
          const created = await session.client.createApp(titleInput.value.trim());
          appId = created.app_id;
        }
        const notebook = notebookInput.files?.[0];
        const manifest = manifestInput.files?.[0];
        if (!notebook || !manifest) {
          outcome.appendChild(el(doc, "div", { className: "error-box" }, "choose both files"));
          return;
        }
        const version = await session.client.submitVersion(appId, notebook, manifest);
        outcome.append(
          el(doc, "div", {}, `version ${version.version_no}: `),
          stateBadge(doc, version.state),
          reportList(doc, version.reports),
        );
      } catch (error) {
        outcome.appendChild(errorBox(doc, error));
      }
    })();
  });
}

// --- My Apps --------------------------------------------------------------------

export async function myAppsView(session: Session, container: HTMLElement): Promise<void> {
  const doc = container.ownerDocument;
  container.replaceChildren(el(doc, "h2", {}, "My applications"));
  try {
    const apps = await session.client.listApps();
    const table = el(doc, "table", { id: "apps-table" });
    for (const app of apps) {
      const row = el(doc, "tr", {});
      row.dataset.appId = app.app_id;
      row.append(
        el(doc, "td", {}, app.title),
        el(doc, "td", {}, app.app_id),
        el(doc, "td", {}, app.slug ?? "—"),
      );
      const stateCell = el(doc, "td", {});
      if (app.latest_state) stateCell.appendChild(stateBadge(doc, app.latest_state));
      row.appendChild(stateCell);
      table.appendChild(row);
    }
    container.appendChild(table);
  } catch (error) {
    container.appendChild(errorBox(doc, error));
  }
}

// --- Review Queue -----------------------------------------------------------------

export async function reviewQueueView(session: Session, container: HTMLElement): Promise<void> {
  const doc = container.ownerDocument;
  container.replaceChildren(el(doc, "h2", {}, "Review queue"));
  try {
    const apps = await session.client.listApps();
    const queue: VersionRecord[] = [];
    for (const app of apps) {
      const versions = await session.client.listVersions(app.app_id);
      for (const version of versions) {
        if (version.state === "InReview" && version.assigned_reviewer === session.userId) {
          queue.push(version);
        }
      }
    }
    if (!queue.length) {
      container.appendChild(el(doc, "p", { id: "queue-empty" }, "nothing waiting on you"));
      return;
    }
    for (const version of queue) {
      container.appendChild(reviewCard(session, doc, version));
    }
  } catch (error) {
    container.appendChild(errorBox(doc, error));
  }
}

function reviewCard(session: Session, doc: Document, version: VersionRecord): HTMLElement {
  const card = el(doc, "div", { className: "review-card" });
  card.dataset.version = `${version.app_id}:${version.version_no}`;
  card.append(
    el(doc, "div", {}, `${version.app_id} v${version.version_no} by ${version.submitted_by}`),
    stateBadge(doc, version.state),
  );
  const comment = el(doc, "input", { placeholder: "comment", className: "review-comment" });
  card.appendChild(comment);
  for (const action of ["approve", "request_changes", "reject"] as const) {
    const button = el(doc, "button", { className: `review-${action}` }, action.replace("_", " "));
    button.addEventListener("click", () => {
      void (async () => {
        try {
          const updated = await session.client.review(
            version.app_id, version.version_no, action, comment.value,
          );
          card.replaceChildren(
            el(doc, "div", {}, `${updated.app_id} v${updated.version_no}`),
            stateBadge(doc, updated.state),
          );
        } catch (error) {
          card.appendChild(errorBox(doc, error));
        }
      })();
    });
    card.appendChild(button);
  }
  return card;
}

// --- Registry -----------------------------------------------------------------------

export async function registryView(session: Session, container: HTMLElement): Promise<void> {
  const doc = container.ownerDocument;
  container.replaceChildren(el(doc, "h2", {}, "Package registry"));
  try {
    const entries = await session.client.listRegistry();
    const table = el(doc, "table", { id: "registry-table" });
    for (const entry of entries) {
      const row = el(doc, "tr", {});
      row.dataset.package = entry.normalized_name;
      row.append(
        el(doc, "td", {}, entry.ecosystem),
        el(doc, "td", {}, entry.normalized_name),
        el(doc, "td", {}, entry.status),
        el(doc, "td", {}, entry.allowed_versions),
      );
      if (session.roles.includes("admin") && entry.status === "pending") {
        for (const decision of ["approve", "reject"]) {
          const button = el(doc, "button", { className: `decide-${decision}` }, decision);
          button.addEventListener("click", () => {
            void session.client
              .decidePackage(entry.ecosystem, entry.normalized_name, decision)
              .then(() => registryView(session, container));
          });
          row.appendChild(button);
        }
      }
      table.appendChild(row);
    }
    container.appendChild(table);

    const form = el(doc, "form", { id: "package-request-form" });
    const name = el(doc, "input", { placeholder: "package name" });
    const note = el(doc, "input", { placeholder: "why you need it" });
    const submit = el(doc, "button", { type: "submit" }, "Request approval");
    form.append(name, note, submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void session.client
        .requestPackage("pypi", name.value, note.value)
        .then(() => registryView(session, container))
        .catch((error) => container.appendChild(errorBox(doc, error)));
    });
    container.appendChild(form);
  } catch (error) {
    container.appendChild(errorBox(doc, error));
  }
}

// --- Audit -------------------------------------------------------------------------

export async function auditView(session: Session, container: HTMLElement): Promise<void> {
  const doc = container.ownerDocument;
  container.replaceChildren(el(doc, "h2", {}, "Audit trail"));
  try {
    const text = await session.client.auditExport(0);
    const lines = text.split("\n").filter((line) => line.length > 0);
    const verdict = await verifyAuditLines(lines);
    const indicator = el(
      doc, "div",
      { id: "audit-verify", className: verdict.ok ? "ok" : "error-box" },
      verdict.ok ? `chain verified (${verdict.events} events)` : `chain BROKEN at seq ${verdict.firstBadSeq}`,
    );
    container.appendChild(indicator);
    const list = el(doc, "pre", { id: "audit-events" });
    list.textContent = lines
      .map((line) => {
        const doc_ = JSON.parse(line) as Record<string, unknown>;
        return `#${doc_.seq} ${doc_.actor} ${doc_.action} ${doc_.app_id ?? ""} ${doc_.next_state ?? ""}`;
      })
      .join("\n");
    container.appendChild(list);
  } catch (error) {
    container.appendChild(errorBox(doc, error));
  }
}

// --- App Runner -----------------------------------------------------------------------

export async function appRunnerView(
  session: Session,
  container: HTMLElement,
  slug: string,
  previewToken?: string,
): Promise<void> {
  const doc = container.ownerDocument;
  container.replaceChildren();
  try {
    const shell = previewToken
      ? await session.client.previewShell(previewToken)
      : await session.client.appShell(slug);
    container.appendChild(el(doc, "h2", {}, shell.schema.app_title));
    const form = el(doc, "form", { id: "runner-form" });
    renderControls(shell.schema, form);
    const run = el(doc, "button", { type: "submit", id: "runner-run" }, "Run");
    form.appendChild(run);
    const gallery = el(doc, "div", { id: "output-gallery" });
    container.append(form, gallery);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        gallery.replaceChildren(el(doc, "p", {}, "running…"));
        try {
          const params = readValues(shell.schema, form);
          const result = previewToken
            ? await session.client.previewRun(previewToken, params)
            : await session.client.runApp(slug, params);
          renderOutputs(doc, gallery, result);
        } catch (error) {
          gallery.replaceChildren(errorBox(doc, error));
        }
      })();
    });
  } catch (error) {
    container.appendChild(errorBox(doc, error));
  }
}

export function renderOutputs(doc: Document, gallery: HTMLElement, result: RunResult): void {
  gallery.replaceChildren();
  gallery.appendChild(el(doc, "div", { id: "run-status", className: `status-${result.status}` }, result.status));
  for (const output of result.outputs) {
    const frame = el(doc, "div", { className: "output" });
    if (output.mime_kind === "html" && output.payload_text) {
      const body = el(doc, "div", { className: "output-html" });
      body.innerHTML = output.payload_text;
      frame.appendChild(body);
    } else if (output.payload_text) {
      frame.appendChild(el(doc, "pre", {}, output.payload_text));
    } else if (output.mime_kind === "image_png" && output.payload_b64) {
      const img = el(doc, "img", {});
      img.src = `data:image/png;base64,${output.payload_b64}`;
      frame.appendChild(img);
    } else {
      frame.appendChild(el(doc, "a", {}, `download ${output.payload_ref}`));
    }
    gallery.appendChild(frame);
  }
  for (const violation of result.violations) {
    gallery.appendChild(el(doc, "div", { className: "violation" }, `${violation.kind}: ${violation.detail}`));
  }
}
