// View model: a pure snapshot of server truth plus the pending-diff overlay.
// Reload-safe by construction: everything here is refetchable from the API.

import type { CellDoc, DagDoc, NotebookDoc, SuggestionDoc } from "./types.js";

export interface ViewModel {
  notebook: NotebookDoc | null;
  sessionId: string | null;
  pending: SuggestionDoc | null;
  dag: DagDoc | null;
  banner: { kind: "error" | "info"; text: string; retryable: boolean } | null;
  busy: boolean;
}

export function emptyModel(): ViewModel {
  return { notebook: null, sessionId: null, pending: null, dag: null, banner: null, busy: false };
}

export interface DiffEntry {
  cell: CellDoc;
  proposed: boolean;
}

/** Committed cells in document order, then proposed cells appended and
 * flagged, mirroring how accept will commit them. */
export function diffView(model: ViewModel): DiffEntry[] {
  const committed = (model.notebook?.cells ?? []).map((cell) => ({
    cell,
    proposed: false,
  }));
  const proposed = (model.pending?.cells ?? []).map((cell) => ({
    cell,
    proposed: true,
  }));
  return [...committed, ...proposed];
}

export function canSubmit(model: ViewModel): boolean {
  return model.sessionId !== null && model.pending === null && !model.busy;
}

/** Edges of the DAG overlay, filtered to cells currently displayed. */
export function overlayEdges(model: ViewModel): [string, string][] {
  if (!model.dag) return [];
  const visible = new Set(diffView(model).map((entry) => entry.cell.id));
  return model.dag.edges.filter(([src, dst]) => visible.has(src) && visible.has(dst));
}
