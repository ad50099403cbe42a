// Minimal SVG renderer for the engine's chart grammar documents. The spec
// arrives with data values already bound; no client-side re-aggregation.

import type { ChartSpec } from "./types.js";

const WIDTH = 360;
const HEIGHT = 180;
const PAD = 28;

function svgEl(doc: Document, tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = doc.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el as SVGElement;
}

export function renderChartSpec(container: HTMLElement, spec: ChartSpec): void {
  const doc = container.ownerDocument;
  const values = spec.data?.values ?? [];
  const svg = svgEl(doc, "svg", {
    width: WIDTH,
    height: HEIGHT,
    "data-mark": spec.mark,
    class: "chart",
  });
  container.appendChild(svg);
  if (values.length === 0) {
    const note = svgEl(doc, "text", { x: PAD, y: HEIGHT / 2 });
    note.textContent = `${spec.mark} chart (no inline data)`;
    svg.appendChild(note);
    return;
  }

  const xField = spec.encoding.x?.field;
  const yField = spec.encoding.y.field ?? "";
  const ys = values.map((row) => Number(row[yField] ?? 0));
  const maxY = Math.max(...ys, 1);
  const innerW = WIDTH - 2 * PAD;
  const innerH = HEIGHT - 2 * PAD;
  const step = innerW / values.length;

  values.forEach((row, i) => {
    const yv = Number(row[yField] ?? 0);
    const h = (yv / maxY) * innerH;
    const cx = PAD + i * step + step / 2;
    const baseY = HEIGHT - PAD;
    if (spec.mark === "bar") {
      svg.appendChild(
        svgEl(doc, "rect", {
          x: cx - step * 0.35,
          y: baseY - h,
          width: step * 0.7,
          height: h,
          class: "bar",
        }),
      );
    } else {
      svg.appendChild(svgEl(doc, "circle", { cx, cy: baseY - h, r: 3, class: "pt" }));
    }
    const label = svgEl(doc, "text", { x: cx, y: HEIGHT - 8, "text-anchor": "middle", "font-size": 9 });
    label.textContent = xField ? String(row[xField]) : String(i + 1);
    svg.appendChild(label);
  });

  if (spec.mark === "line") {
    const points = values
      .map((row, i) => {
        const yv = Number(row[yField] ?? 0);
        const cx = PAD + i * step + step / 2;
        return `${cx},${HEIGHT - PAD - (yv / maxY) * innerH}`;
      })
      .join(" ");
    svg.appendChild(svgEl(doc, "polyline", { points, fill: "none", class: "line" }));
  }
}
