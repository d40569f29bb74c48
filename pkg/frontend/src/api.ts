/** Typed client for the validator service's JSON API. */

export type Format = "trig" | "nquads";

export interface Issue {
  rule: string;
  message: string;
  graph: string | null;
}

export interface CheckResponse {
  wellFormed: boolean;
  trusty: "valid" | "invalid" | "none";
  signed: "valid" | "invalid" | "none";
  issues: Issue[];
}

export interface PublishResponse {
  publishedCount: number;
  server: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // non-JSON error body; fall through
  }
  return `server answered ${res.status}`;
}

async function postJson(path: string, payload: unknown): Promise<Response> {
  const res = await fetch(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
  if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
  return res;
}

export async function check(
  content: string,
  format: Format = "trig",
): Promise<CheckResponse> {
  const res = await postJson("/api/check", { content, format });
  return (await res.json()) as CheckResponse;
}

export async function transform(
  content: string,
  from: Format,
  to: Format,
): Promise<string> {
  const res = await postJson("/api/transform", { content, from, to });
  return res.text();
}

export async function publish(content: string): Promise<PublishResponse> {
  const res = await postJson("/api/publish", { content });
  return (await res.json()) as PublishResponse;
}

export async function fetchNanopub(ref: string): Promise<string> {
  const res = await fetch(`/api/fetch?ref=${encodeURIComponent(ref)}`);
  if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
  return res.text();
}
