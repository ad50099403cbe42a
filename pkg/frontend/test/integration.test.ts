// Integration: the real Python service with scripted fixtures, driven through
// the client. Covers the ask -> 2-cell diff -> accept/reject loop and the DAG
// overlay gaining the committed edge.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { JSDOM } from "jsdom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { renderDagOverlay } from "../src/dag_overlay.js";
import { diffView, emptyModel, overlayEdges } from "../src/state.js";
import type { NotebookDoc, ScopeControls } from "../src/types.js";

const FIXTURES = resolve(__dirname, "fixtures");
const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

const meta = JSON.parse(readFileSync(join(FIXTURES, "meta.json"), "utf-8")) as {
  query: string;
  scope: ScopeControls;
  table_name: string;
  now: string;
};
const notebookDoc = JSON.parse(
  readFileSync(join(FIXTURES, "notebook.json"), "utf-8"),
) as NotebookDoc;
const rows = JSON.parse(readFileSync(join(FIXTURES, "rows.json"), "utf-8")) as Record<
  string,
  unknown
>[];

let server: ChildProcess;

async function waitForHealth(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  const storeDir = mkdtempSync(join(tmpdir(), "askbook-ui-it-"));
  const configPath = join(storeDir, "config.json");
  writeFileSync(
    configPath,
    JSON.stringify({
      store_dir: storeDir,
      host: "127.0.0.1",
      port: PORT,
      provider: "scripted",
      fixtures_dir: FIXTURES,
      now: meta.now,
    }),
  );
  server = spawn("python3", ["-m", "askbook.service.cli", "serve", "--config", configPath], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stderr?.on("data", (chunk: Buffer) => {
    const text = chunk.toString();
    if (text.includes("Traceback")) console.error(text);
  });
  await waitForHealth();
  const client = new ApiClient(BASE);
  await client.putNotebook(notebookDoc);
}, 30000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("ask/accept loop against the live service", () => {
  it("reject leaves the notebook byte-identical", async () => {
    const client = new ApiClient(BASE);
    const before = await client.getNotebookBytes(notebookDoc.id);
    const { session_id } = await client.createSession(
      notebookDoc.id,
      meta.table_name,
      rows,
    );
    const suggestion = await client.ask(session_id, meta.query, meta.scope);
    expect(suggestion.cells).toHaveLength(2);
    await client.resolve(session_id, "reject");
    const after = await client.getNotebookBytes(notebookDoc.id);
    expect(after).toBe(before);
  });

  it("submit renders a 2-cell diff and accept commits it with a new DAG edge", async () => {
    const client = new ApiClient(BASE);
    const { session_id } = await client.createSession(
      notebookDoc.id,
      meta.table_name,
      rows,
    );
    const suggestion = await client.ask(session_id, meta.query, meta.scope);
    expect(suggestion.cells.map((c) => c.kind)).toEqual(["sql", "chart"]);
    expect(suggestion.pending).toBe(true);

    // diff view flags exactly the proposed cells
    const pendingModel = {
      ...emptyModel(),
      notebook: notebookDoc,
      pending: suggestion,
      sessionId: session_id,
    };
    const proposedIds = diffView(pendingModel)
      .filter((entry) => entry.proposed)
      .map((entry) => entry.cell.id);
    expect(proposedIds).toEqual(suggestion.cells.map((c) => c.id));

    const { revision } = await client.resolve(session_id, "accept");
    expect(revision).toBe(notebookDoc.revision + 2);

    const committed = await client.getNotebook(notebookDoc.id);
    expect(committed.cells).toHaveLength(notebookDoc.cells.length + 2);

    // the DAG overlay shows the new sql -> chart edge
    const dag = await client.getDag(session_id);
    const [sqlCell, chartCell] = suggestion.cells;
    expect(dag.edges).toContainEqual([sqlCell.id, chartCell.id]);

    const dom = new JSDOM("<div id='rail'></div>");
    const holder = dom.window.document.getElementById("rail")!;
    const model = { ...emptyModel(), notebook: committed, dag, sessionId: session_id };
    renderDagOverlay(holder, diffView(model), overlayEdges(model));
    const edge = holder.querySelector(
      `path.dag-edge[data-from="${sqlCell.id}"][data-to="${chartCell.id}"]`,
    );
    expect(edge).not.toBeNull();

    // restore the fixture notebook so test order does not matter
    await client.putNotebook(notebookDoc);
  }, 20000);
});
