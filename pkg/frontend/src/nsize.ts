/**
 * Per-agent neighborhood size over time. Flat lines for fixed-size runs,
 * staircases when the adaptive policy resizes.
 */

import { column, readTable } from "./csv";
import { colorFor, drawAxes, drawLegend, FRAME, padRange, SvgDoc } from "./svg";

export interface SizeSeries {
  agent: number;
  k: number[];
  n: number[];
}

export function loadSizes(file: string): SizeSeries[] {
  const table = readTable(file, ["k", "agent", "n_i"]);
  const k = column(table, "k", file);
  const agent = column(table, "agent", file);
  const n = column(table, "n_i", file);

  const byAgent = new Map<number, Array<{ k: number; n: number }>>();
  for (let i = 0; i < k.length; i++) {
    let list = byAgent.get(agent[i]);
    if (!list) {
      list = [];
      byAgent.set(agent[i], list);
    }
    list.push({ k: k[i], n: n[i] });
  }
  return [...byAgent.keys()]
    .sort((a, b) => a - b)
    .map((a) => {
      const list = byAgent.get(a)!;
      list.sort((u, v) => u.k - v.k);
      return { agent: a, k: list.map((e) => e.k), n: list.map((e) => e.n) };
    });
}

export function renderSizes(series: SizeSeries[], title = "Neighborhood sizes"): string {
  const allK = series.flatMap((s) => s.k);
  const allN = series.flatMap((s) => s.n);
  const [x0, x1] = padRange(Math.min(...allK), Math.max(...allK));
  const [y0, y1] = padRange(Math.min(...allN), Math.max(...allN));

  const doc = new SvgDoc(FRAME.w, FRAME.h);
  const { X, Y } = drawAxes(
    doc,
    FRAME,
    { min: x0, max: x1, label: "step k" },
    { min: y0, max: y1, label: "neighborhood size" },
    title
  );

  series.forEach((s, i) => {
    doc.polyline(
      s.k.map((k, j) => [X(k), Y(s.n[j])] as [number, number]),
      { class: "nsize", stroke: colorFor(i), "stroke-width": 1.4, opacity: 0.85 }
    );
  });

  if (series.length <= 12) {
    drawLegend(
      doc,
      FRAME,
      series.map((s, i) => ({ label: `agent ${s.agent}`, color: colorFor(i) }))
    );
  }
  return doc.toString();
}

export function plotSizes(file: string, title?: string): string {
  return renderSizes(loadSizes(file), title);
}
