// Read-only dependency overlay: one dot per visible cell in a vertical rail,
// curved arrows for edges. Editing dependencies happens only by editing code.

import type { DiffEntry } from "./state.js";

const RAIL_X = 18;
const ROW_H = 26;

function svgEl(doc: Document, tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = doc.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el as SVGElement;
}

export function renderDagOverlay(
  container: HTMLElement,
  entries: DiffEntry[],
  edges: [string, string][],
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const height = Math.max(entries.length * ROW_H + ROW_H, ROW_H * 2);
  const svg = svgEl(doc, "svg", {
    width: 120,
    height,
    class: "dag-overlay",
    "data-edge-count": edges.length,
  });
  container.appendChild(svg);

  const rowOf = new Map<string, number>();
  entries.forEach((entry, i) => rowOf.set(entry.cell.id, i));

  for (const [src, dst] of edges) {
    const a = rowOf.get(src);
    const b = rowOf.get(dst);
    if (a === undefined || b === undefined) continue;
    const y1 = a * ROW_H + ROW_H / 2;
    const y2 = b * ROW_H + ROW_H / 2;
    const bow = 16 + Math.abs(b - a) * 6;
    const path = svgEl(doc, "path", {
      d: `M ${RAIL_X} ${y1} C ${RAIL_X + bow} ${y1}, ${RAIL_X + bow} ${y2}, ${RAIL_X} ${y2}`,
      fill: "none",
      class: "dag-edge",
      "data-from": src,
      "data-to": dst,
    });
    svg.appendChild(path);
  }

  entries.forEach((entry, i) => {
    const cy = i * ROW_H + ROW_H / 2;
    svg.appendChild(
      svgEl(doc, "circle", {
        cx: RAIL_X,
        cy,
        r: 5,
        class: entry.proposed ? "dag-node proposed" : "dag-node",
        "data-cell": entry.cell.id,
      }),
    );
    const label = svgEl(doc, "text", { x: RAIL_X + 12, y: cy + 3, "font-size": 9 });
    label.textContent = entry.cell.id;
    svg.appendChild(label);
  });
}
