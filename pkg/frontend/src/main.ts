// App controller: the only state kept client-side is the session id (in the
// URL); everything rendered is refetched server truth, so reload is lossless.

import { ApiClient, ApiError } from "./api.js";
import { emptyModel, type ViewModel } from "./state.js";
import { renderApp } from "./render.js";
import type { CellDoc, ScopeControls } from "./types.js";

export class App {
  readonly model: ViewModel = emptyModel();
  private notebookId: string;
  private lastAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    notebookId: string,
    sessionId?: string,
  ) {
    this.notebookId = notebookId;
    this.model.sessionId = sessionId ?? null;
  }

  private render(): void {
    renderApp(this.root, this.model, {
      onSubmit: (query, scope) => void this.submitQuery(query, scope),
      onResolve: (decision, cells) => void this.resolveSuggestion(decision, cells),
      onRetry: () => void this.retry(),
    });
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    this.lastAction = action;
    this.model.busy = true;
    this.model.banner = null;
    this.render();
    try {
      await action();
    } catch (error) {
      if (error instanceof ApiError) {
        this.model.banner = {
          kind: "error",
          text: error.message,
          retryable: false,
        };
      } else {
        this.model.banner = {
          kind: "error",
          text: `Network failure: ${String(error)}`,
          retryable: true,
        };
      }
    } finally {
      this.model.busy = false;
      this.render();
    }
  }

  async start(): Promise<void> {
    await this.guard(async () => {
      this.model.notebook = await this.api.getNotebook(this.notebookId);
      if (!this.model.sessionId) {
        const created = await this.api.createSession(this.notebookId);
        this.model.sessionId = created.session_id;
      }
      this.model.dag = await this.api.getDag(this.model.sessionId);
    });
  }

  async submitQuery(query: string, scope: ScopeControls): Promise<void> {
    await this.guard(async () => {
      const sessionId = this.model.sessionId;
      if (!sessionId) throw new Error("no session");
      this.model.pending = await this.api.ask(sessionId, query, scope);
    });
  }

  async resolveSuggestion(
    decision: "accept" | "reject",
    editedCells: CellDoc[],
  ): Promise<void> {
    await this.guard(async () => {
      const sessionId = this.model.sessionId;
      if (!sessionId || !this.model.pending) throw new Error("nothing pending");
      if (decision === "reject") {
        await this.api.resolve(sessionId, "reject");
      } else {
        const changed = editedCells.some(
          (cell, i) => cell.source !== this.model.pending!.cells[i]?.source,
        );
        // user edits ride along as an "edit" decision; untouched accepts stay "accept"
        if (changed) await this.api.resolve(sessionId, "edit", editedCells);
        else await this.api.resolve(sessionId, "accept");
      }
      this.model.pending = null;
      this.model.notebook = await this.api.getNotebook(this.notebookId);
      this.model.dag = await this.api.getDag(sessionId);
    });
  }

  async retry(): Promise<void> {
    const action = this.lastAction;
    if (action) await this.guard(action);
  }
}

export function boot(doc: Document): App | null {
  const root = doc.getElementById("app");
  if (!root) return null;
  const params = new URLSearchParams(doc.location?.search ?? "");
  const notebookId = params.get("notebook") ?? "nb1";
  const sessionId = params.get("session") ?? undefined;
  const base = params.get("api") ?? "";
  const app = new App(new ApiClient(base), root, notebookId, sessionId);
  void app.start();
  return app;
}
