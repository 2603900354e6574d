/** Thin typed client over the pldiag HTTP/JSON contract.
 *
 * Every method maps to exactly one endpoint; no client-side inference.
 */

import type {
  ProofTreeJson,
  QuestionJson,
  SessionView,
  TraceEntryJson,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function jsonOrThrow<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export interface SessionRequest {
  program_id: string;
  spec_id: string;
  kind: "corr" | "compl";
  query: string;
  answer?: string;
  mode?: "tree" | "alg4" | "alg5";
  restart?: boolean;
  budget?: { max_steps?: number; max_depth?: number; max_answers?: number };
}

export class Client {
  constructor(
    private base: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return jsonOrThrow<T>(res);
  }

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(this.base + path);
    return jsonOrThrow<T>(res);
  }

  createProgram(text: string): Promise<{ id: string; clauses: number }> {
    return this.post("/programs", { text });
  }

  createSpec(text: string): Promise<{ id: string; roles: string[] }> {
    return this.post("/specs", { text });
  }

  createSession(req: SessionRequest): Promise<SessionView> {
    return this.post("/sessions", req);
  }

  getSession(id: string): Promise<SessionView> {
    return this.get(`/sessions/${id}`);
  }

  async getQuestion(
    id: string,
  ): Promise<{ question: QuestionJson | null; state: string }> {
    const res = await this.fetchImpl(this.base + `/sessions/${id}/question`);
    // 404 with a body is the contract's "no pending question" answer
    if (res.status === 404) {
      return (await res.json()) as { question: null; state: string };
    }
    return jsonOrThrow(res);
  }

  postAnswer(id: string, verdict: Verdict): Promise<SessionView> {
    return this.post(`/sessions/${id}/answer`, { verdict });
  }

  /** Raw canonical result bytes, for byte-exact comparisons. */
  async getResultText(id: string): Promise<string> {
    const res = await this.fetchImpl(this.base + `/sessions/${id}/result`);
    if (!res.ok) throw new ApiError(res.status, await res.text());
    return res.text();
  }

  getProofTree(id: string): Promise<ProofTreeJson> {
    return this.get(`/sessions/${id}/prooftree`);
  }

  getTrace(id: string): Promise<{ entries: TraceEntryJson[]; truncated: boolean }> {
    return this.get(`/sessions/${id}/trace`);
  }
}
