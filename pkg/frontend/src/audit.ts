// Independent audit-chain verification in the browser.
//
// Re-implements the export contract: each line is a canonical JSON document
// (sorted keys, compact separators); event_hash is SHA-256 over the document
// without event_hash; prev_hash links to the previous line (genesis all-zero).

const GENESIS = "0".repeat(64);

const FIELDS = [
  "seq",
  "actor",
  "action",
  "app_id",
  "version_no",
  "prev_state",
  "next_state",
  "at",
  "prev_hash",
] as const;

export interface AuditEventDoc {
  seq: number;
  actor: string;
  action: string;
  app_id: string | null;
  version_no: number | null;
  prev_state: string | null;
  next_state: string | null;
  at: string;
  prev_hash: string;
  event_hash: string;
}

export function canonicalStringify(value: unknown): string {
  if (value === null || typeof value === "number" || typeof value === "boolean") {
    return JSON.stringify(value);
  }
  if (typeof value === "string") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalStringify).join(",")}]`;
  }
  const entries = Object.entries(value as Record<string, unknown>).sort(([a], [b]) =>
    a < b ? -1 : a > b ? 1 : 0,
  );
  return `{${entries.map(([k, v]) => `${JSON.stringify(k)}:${canonicalStringify(v)}`).join(",")}}`;
}

async function sha256Hex(text: string): Promise<string> {
  const digest = await crypto.subtle.digest("SHA-256", new TextEncoder().encode(text));
  return [...new Uint8Array(digest)].map((b) => b.toString(16).padStart(2, "0")).join("");
}

export interface VerifyResult {
  ok: boolean;
  events: number;
  firstBadSeq: number | null;
}

export async function verifyAuditLines(lines: string[]): Promise<VerifyResult> {
  let prevHash = GENESIS;
  for (let i = 0; i < lines.length; i += 1) {
    const seq = i + 1;
    let doc: AuditEventDoc;
    try {
      doc = JSON.parse(lines[i]!) as AuditEventDoc;
    } catch {
      return { ok: false, events: lines.length, firstBadSeq: seq };
    }
    const keys = new Set(Object.keys(doc));
    const expected = new Set<string>([...FIELDS, "event_hash"]);
    if (keys.size !== expected.size || [...expected].some((k) => !keys.has(k))) {
      return { ok: false, events: lines.length, firstBadSeq: seq };
    }
    if (doc.seq !== seq || doc.prev_hash !== prevHash) {
      return { ok: false, events: lines.length, firstBadSeq: seq };
    }
    if (canonicalStringify(doc) !== lines[i]) {
      return { ok: false, events: lines.length, firstBadSeq: seq };
    }
    const body: Record<string, unknown> = {};
    for (const field of FIELDS) body[field] = doc[field];
    if ((await sha256Hex(canonicalStringify(body))) !== doc.event_hash) {
      return { ok: false, events: lines.length, firstBadSeq: seq };
    }
    prevHash = doc.event_hash;
  }
  return { ok: true, events: lines.length, firstBadSeq: null };
}
