// Wire protocol: one JSON object per line in both directions.
//
//   request:  {"id": n, "mode": "check"|"equal", "statement": s,
//              "other": t?, "context": [...]}
//   response: {"id": n, "status": "elaborated"|"parsed"|"failed",
//              "normalized": s?, "equal": b?, "diagnostics": [...]}
//
// The worker emits {"ready": true} once at startup.  Every request line gets
// exactly one response line; malformed lines get an error response with the
// offending id when it can be recovered, -1 otherwise.

import { StatementChecker } from "./checker";

export interface CheckResponse {
  id: number;
  status: "elaborated" | "parsed" | "failed";
  normalized?: string;
  equal?: boolean;
  diagnostics: string[];
}

function errorResponse(id: number, message: string): CheckResponse {
  return { id, status: "failed", diagnostics: [message] };
}

export function handleLine(line: string, checker: StatementChecker): CheckResponse | null {
  const trimmed = line.trim();
  if (trimmed === "") return null;

  let parsed: unknown;
  try {
    parsed = JSON.parse(trimmed);
  } catch {
    return errorResponse(-1, "malformed request: invalid JSON");
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return errorResponse(-1, "malformed request: expected an object");
  }
  const req = parsed as Record<string, unknown>;
  const id = typeof req.id === "number" && Number.isFinite(req.id) ? (req.id as number) : -1;

  const statement = req.statement;
  if (typeof statement !== "string" || statement === "") {
    return errorResponse(id, "malformed request: missing statement");
  }
  const mode = req.mode === undefined ? "check" : req.mode;
  if (mode === "check") {
    const outcome = checker.check(statement);
    return { id, status: outcome.status, normalized: outcome.normalized, diagnostics: outcome.diagnostics };
  }
  if (mode === "equal") {
    const other = req.other;
    if (typeof other !== "string" || other === "") {
      return errorResponse(id, "malformed request: equal mode needs `other`");
    }
    const { equal, outcome } = checker.equal(statement, other);
    return {
      id,
      status: outcome.status,
      normalized: outcome.normalized,
      equal,
      diagnostics: outcome.diagnostics,
    };
  }
  return errorResponse(id, `malformed request: unknown mode ${String(mode)}`);
}

export function encodeResponse(resp: CheckResponse): string {
  const body: Record<string, unknown> = { id: resp.id, status: resp.status };
  if (resp.normalized !== undefined) body.normalized = resp.normalized;
  if (resp.equal !== undefined) body.equal = resp.equal;
  body.diagnostics = resp.diagnostics;
  return JSON.stringify(body);
}
