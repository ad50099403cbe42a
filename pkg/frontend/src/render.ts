// DOM rendering for the notebook client: cell list with pending-diff
// styling, query box, resolve controls, error banner, DAG overlay.

import { renderChartSpec } from "./chart.js";
import { renderDagOverlay } from "./dag_overlay.js";
import { canSubmit, diffView, overlayEdges, type ViewModel } from "./state.js";
import type { CellDoc, ChartSpec, ScopeControls } from "./types.js";

export interface Handlers {
  onSubmit(query: string, scope: ScopeControls): void;
  onResolve(decision: "accept" | "reject", editedCells: CellDoc[]): void;
  onRetry(): void;
}

const KNOWN_KINDS = new Set(["sql", "python", "markdown", "chart"]);

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderMarkdown(doc: Document, source: string): HTMLElement {
  // headings and paragraphs only; rich rendering is out of scope
  const wrap = el(doc, "div", "md");
  for (const line of source.split("\n")) {
    if (line.startsWith("## ")) wrap.appendChild(el(doc, "h3", "", line.slice(3)));
    else if (line.startsWith("# ")) wrap.appendChild(el(doc, "h2", "", line.slice(2)));
    else if (line.trim()) wrap.appendChild(el(doc, "p", "", line));
  }
  return wrap;
}

function chartSpecOf(cell: CellDoc): ChartSpec | null {
  const output = (cell.outputs ?? []).find((o) => o.kind === "chart_spec");
  if (output) return output.payload as ChartSpec;
  try {
    return JSON.parse(cell.source) as ChartSpec;
  } catch {
    return null;
  }
}

export function renderCell(doc: Document, cell: CellDoc, proposed: boolean): HTMLElement {
  const article = el(doc, "article", proposed ? "cell proposed" : "cell");
  article.dataset.cellId = cell.id;
  article.dataset.kind = String(cell.kind);
  const head = el(doc, "header", "cell-head",
    `${cell.id} · ${cell.kind}${cell.binding ? ` → ${cell.binding}` : ""}` +
    (proposed ? " · proposed" : ""));
  article.appendChild(head);

  if (cell.kind === "sql" || cell.kind === "python") {
    const editor = el(doc, "textarea", "code-editor");
    editor.value = cell.source;
    editor.readOnly = !proposed;     // only proposed cells are editable pre-commit
    editor.rows = Math.max(2, cell.source.split("\n").length);
    article.appendChild(editor);
  } else if (cell.kind === "markdown") {
    article.appendChild(renderMarkdown(doc, cell.source));
  } else if (cell.kind === "chart") {
    const spec = chartSpecOf(cell);
    const holder = el(doc, "div", "chart-holder");
    article.appendChild(holder);
    if (spec) {
      renderChartSpec(holder, spec);
    } else {
      holder.appendChild(el(doc, "pre", "raw-fallback", cell.source));
    }
  }
  if (!KNOWN_KINDS.has(String(cell.kind))) {
    article.appendChild(el(doc, "pre", "raw-fallback", JSON.stringify(cell, null, 2)));
  }
  return article;
}

function readScope(doc: Document): ScopeControls {
  const level = (doc.querySelector<HTMLSelectElement>("#scope-level")?.value ??
    "notebook") as ScopeControls["level"];
  const anchor = doc.querySelector<HTMLInputElement>("#scope-anchor")?.value || undefined;
  const variable = doc.querySelector<HTMLInputElement>("#scope-var")?.value || undefined;
  const task = doc.querySelector<HTMLSelectElement>("#scope-task")?.value ?? "Other";
  return { level, anchor_cell: anchor, data_variable: variable, task_type: task };
}

export function collectEditedCells(root: HTMLElement, model: ViewModel): CellDoc[] {
  const cells: CellDoc[] = [];
  for (const suggested of model.pending?.cells ?? []) {
    const editor = root.querySelector<HTMLTextAreaElement>(
      `article[data-cell-id="${suggested.id}"] textarea`,
    );
    cells.push(editor ? { ...suggested, source: editor.value } : { ...suggested });
  }
  return cells;
}

export function renderApp(root: HTMLElement, model: ViewModel, handlers: Handlers): void {
  const doc = root.ownerDocument;
  root.textContent = "";

  if (model.banner) {
    const banner = el(doc, "div", `banner ${model.banner.kind}`, model.banner.text);
    if (model.banner.retryable) {
      const retry = el(doc, "button", "retry", "Retry");
      retry.addEventListener("click", () => handlers.onRetry());
      banner.appendChild(retry);
    }
    root.appendChild(banner);
  }

  const layout = el(doc, "div", "layout");
  root.appendChild(layout);
  const rail = el(doc, "aside", "rail");
  const mainCol = el(doc, "main", "cells");
  layout.appendChild(rail);
  layout.appendChild(mainCol);

  const entries = diffView(model);
  if (entries.length === 0) {
    mainCol.appendChild(el(doc, "p", "empty-note", "Empty notebook — ask a query to add cells."));
  }
  for (const entry of entries) {
    mainCol.appendChild(renderCell(doc, entry.cell, entry.proposed));
  }
  renderDagOverlay(rail, entries, overlayEdges(model));

  const form = el(doc, "form", "ask-form");
  form.innerHTML = `
    <input id="query" type="text" placeholder="Ask about this data…" />
    <select id="scope-level">
      <option value="notebook">notebook</option>
      <option value="cell">cell</option>
    </select>
    <input id="scope-anchor" type="text" placeholder="anchor cell" />
    <input id="scope-var" type="text" placeholder="data variable" />
    <select id="scope-task">
      <option>Other</option><option>NL2SQL</option><option>NL2DSCode</option>
      <option>NL2VIS</option><option>NL2Insight</option>
    </select>
    <button id="submit" type="submit">Ask</button>
  `;
  const submit = form.querySelector<HTMLButtonElement>("#submit")!;
  submit.disabled = !canSubmit(model);
  if (model.pending) {
    submit.title = "Resolve the pending suggestion first";
  }
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const query = form.querySelector<HTMLInputElement>("#query")!.value.trim();
    if (query && canSubmit(model)) handlers.onSubmit(query, readScope(doc));
  });
  root.appendChild(form);

  if (model.pending) {
    const bar = el(doc, "div", "resolve-bar");
    bar.appendChild(el(doc, "span", "answer", model.pending.answer));
    const accept = el(doc, "button", "accept", "Accept");
    accept.addEventListener("click", () =>
      handlers.onResolve("accept", collectEditedCells(root, model)));
    const reject = el(doc, "button", "reject", "Reject");
    reject.addEventListener("click", () => handlers.onResolve("reject", []));
    bar.appendChild(accept);
    bar.appendChild(reject);
    root.appendChild(bar);
  }
}
