// Thin client over the askbook HTTP API. Every notebook mutation in the UI
// goes through resolve(); there is deliberately no other write path.

import type {
  ApiErrorBody,
  CellDoc,
  DagDoc,
  NotebookDoc,
  ScopeControls,
  SuggestionDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.error}${body.stage ? ` [${body.stage}]` : ""}: ${body.message ?? ""}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { error: `HTTP ${response.status}` };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; revisions: Record<string, number> }> {
    return this.request("/health");
  }

  getNotebook(id: string): Promise<NotebookDoc> {
    return this.request(`/notebooks/${encodeURIComponent(id)}`);
  }

  async getNotebookBytes(id: string): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/notebooks/${encodeURIComponent(id)}`,
    );
    if (!response.ok) throw new ApiError(response.status, { error: "HTTP" });
    return response.text();
  }

  putNotebook(doc: NotebookDoc): Promise<{ id: string; revision: number }> {
    return this.request(`/notebooks/${encodeURIComponent(doc.id)}`, {
      method: "PUT",
      body: JSON.stringify(doc),
    });
  }

  createSession(
    notebookId: string,
    tableName = "data",
    rows: Record<string, unknown>[] = [],
  ): Promise<{ session_id: string }> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ notebook_id: notebookId, table_name: tableName, rows }),
    });
  }

  ask(sessionId: string, query: string, scope: ScopeControls): Promise<SuggestionDoc> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/ask`, {
      method: "POST",
      body: JSON.stringify({ query, scope }),
    });
  }

  resolve(
    sessionId: string,
    decision: "accept" | "reject" | "edit",
    cells?: CellDoc[],
  ): Promise<{ revision: number }> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/resolve`, {
      method: "POST",
      body: JSON.stringify(cells ? { decision, cells } : { decision }),
    });
  }

  getDag(sessionId: string): Promise<DagDoc> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/dag`);
  }
}
