// @vitest-environment jsdom

import { describe, expect, it } from "vitest";
import { renderDagOverlay } from "../src/dag_overlay.js";
import { diffView, emptyModel, overlayEdges } from "../src/state.js";
import type { DagDoc, NotebookDoc, SuggestionDoc } from "../src/types.js";

const NOTEBOOK: NotebookDoc = {
  id: "nb1",
  revision: 2,
  cells: [
    { id: "c1", kind: "sql", source: "SELECT a FROM t", binding: "df1" },
    { id: "c2", kind: "python", source: "x = df1" },
  ],
};

const DAG: DagDoc = {
  nodes: ["c1", "c2"],
  edges: [["c1", "c2"]],
  var_defs: { df1: [["c1", 0]] },
  diagnostics: {},
};

describe("dag overlay", () => {
  it("draws one node per visible cell and one path per edge", () => {
    const model = { ...emptyModel(), notebook: NOTEBOOK, dag: DAG };
    const holder = document.createElement("div");
    renderDagOverlay(holder, diffView(model), overlayEdges(model));
    expect(holder.querySelectorAll("circle.dag-node")).toHaveLength(2);
    const edge = holder.querySelector('path.dag-edge[data-from="c1"][data-to="c2"]');
    expect(edge).not.toBeNull();
  });

  it("marks proposed cells and hides edges to cells not displayed", () => {
    const pending: SuggestionDoc = {
      pending: true,
      answer: "",
      trace: [],
      cells: [{ id: "q0_0", kind: "sql", source: "SELECT 1" }],
    };
    const dag: DagDoc = { ...DAG, edges: [["c1", "c2"], ["c2", "zz"]] };
    const model = { ...emptyModel(), notebook: NOTEBOOK, dag, pending };
    const holder = document.createElement("div");
    renderDagOverlay(holder, diffView(model), overlayEdges(model));
    expect(holder.querySelectorAll("circle.dag-node.proposed")).toHaveLength(1);
    expect(holder.querySelectorAll("path.dag-edge")).toHaveLength(1);
  });
});
