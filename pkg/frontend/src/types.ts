// Wire types for the askbook HTTP API. The client renders only what the
// server returns; it never invents state of its own.

export type CellKind = "sql" | "python" | "markdown" | "chart";

export interface OutputDoc {
  kind: "text" | "table_preview" | "chart_spec" | "error";
  payload: unknown;
  produced_at: number;
}

export interface CellDoc {
  id: string;
  kind: CellKind | string;
  source: string;
  binding?: string | null;
  outputs?: OutputDoc[];
  syntax_ok?: boolean;
  [extra: string]: unknown;
}

export interface NotebookDoc {
  id: string;
  revision: number;
  cells: CellDoc[];
  [extra: string]: unknown;
}

export interface TraceEventDoc {
  event: string;
  agent: string;
  state: string;
  unit_key: string | null;
  timestamp: number;
}

export interface SuggestionDoc {
  pending: boolean;
  cells: CellDoc[];
  answer: string;
  trace: TraceEventDoc[];
}

export interface DagDoc {
  nodes: string[];
  edges: [string, string][];
  var_defs: Record<string, [string, number][]>;
  diagnostics: Record<string, string>;
}

export interface ScopeControls {
  level: "cell" | "notebook";
  anchor_cell?: string;
  data_variable?: string;
  task_type: string;
}

export interface ChartSpec {
  grammar: string;
  mark: "bar" | "line" | "point" | string;
  data?: { name?: string; values?: Record<string, unknown>[] };
  encoding: {
    x?: { field: string; type?: string; aggregate?: string };
    y: { field?: string; type?: string; aggregate?: string };
    color?: { field: string; type?: string };
  };
}

export interface ApiErrorBody {
  error: string;
  stage?: string | null;
  message?: string;
}
