/**
 * Trajectory figure: thin per-agent paths, final communication graph in
 * bold, final positions as open circles, initial positions as black dots.
 */

import { column, readTable, SchemaError } from "./csv";
import { colorFor, drawAxes, FRAME, padRange, plotRect, SvgDoc } from "./svg";

export interface AgentPath {
  agent: number;
  points: Array<[number, number]>;
}

/** Read a trajectory table and split it into per-agent paths ordered by k. */
export function loadPaths(file: string): AgentPath[] {
  const table = readTable(file, ["k", "agent", "x1", "x2"]);
  const k = column(table, "k", file);
  const agent = column(table, "agent", file);
  const x1 = column(table, "x1", file);
  const x2 = column(table, "x2", file);

  const byAgent = new Map<number, Array<{ k: number; p: [number, number] }>>();
  for (let i = 0; i < k.length; i++) {
    let list = byAgent.get(agent[i]);
    if (!list) {
      list = [];
      byAgent.set(agent[i], list);
    }
    list.push({ k: k[i], p: [x1[i], x2[i]] });
  }
  const agents = [...byAgent.keys()].sort((a, b) => a - b);
  return agents.map((a) => {
    const list = byAgent.get(a)!;
    list.sort((u, v) => u.k - v.k);
    return { agent: a, points: list.map((e) => e.p) };
  });
}

function dist2(p: [number, number], q: [number, number]): number {
  const dx = p[0] - q[0];
  const dy = p[1] - q[1];
  return dx * dx + dy * dy;
}

/** Pairs whose final squared distance is inside the interaction radius. */
export function finalEdges(paths: AgentPath[], rho2: number): Array<[number, number]> {
  const finals = paths.map((p) => p.points[p.points.length - 1]);
  const edges: Array<[number, number]> = [];
  for (let i = 0; i < finals.length; i++) {
    for (let j = i + 1; j < finals.length; j++) {
      if (dist2(finals[i], finals[j]) < rho2) edges.push([i, j]);
    }
  }
  return edges;
}

export function renderPaths(
  paths: AgentPath[],
  rho2: number,
  title = "Agent trajectories"
): string {
  if (paths.length === 0) {
    throw new SchemaError("trajectory table has no agents");
  }
  const all = paths.flatMap((p) => p.points);
  const [px0, px1] = padRange(
    Math.min(...all.map((p) => p[0])),
    Math.max(...all.map((p) => p[0]))
  );
  const [py0, py1] = padRange(
    Math.min(...all.map((p) => p[1])),
    Math.max(...all.map((p) => p[1]))
  );

  // positions live in one metric space, so the mapping keeps aspect ratio:
  // widen the shorter data span until it fills the plot rect at the same scale
  const r = plotRect(FRAME);
  const scale = Math.min(r.w / (px1 - px0), r.h / (py1 - py0));
  const cx = (px0 + px1) / 2;
  const cy = (py0 + py1) / 2;
  const xHalf = r.w / (2 * scale);
  const yHalf = r.h / (2 * scale);

  const doc = new SvgDoc(FRAME.w, FRAME.h);
  const { X, Y } = drawAxes(
    doc,
    FRAME,
    { min: cx - xHalf, max: cx + xHalf, label: "x1" },
    { min: cy - yHalf, max: cy + yHalf, label: "x2" },
    title
  );

  paths.forEach((p, i) => {
    const moved = p.points.some((q) => dist2(q, p.points[0]) > 0);
    if (!moved) return; // stationary agents leave no trace, just markers
    doc.polyline(
      p.points.map(([x, y]) => [X(x), Y(y)] as [number, number]),
      { class: "path", stroke: colorFor(i), "stroke-width": 0.9, opacity: 0.75 }
    );
  });

  const finals = paths.map((p) => p.points[p.points.length - 1]);
  for (const [i, j] of finalEdges(paths, rho2)) {
    doc.line(X(finals[i][0]), Y(finals[i][1]), X(finals[j][0]), Y(finals[j][1]), {
      class: "edge",
      stroke: "#222222",
      "stroke-width": 2.2,
      opacity: 0.8,
    });
  }

  paths.forEach((p, i) => {
    const f = finals[i];
    doc.circle(X(f[0]), Y(f[1]), 4, {
      class: "final",
      fill: "#ffffff",
      stroke: colorFor(i),
      "stroke-width": 1.5,
    });
  });

  for (const p of paths) {
    doc.circle(X(p.points[0][0]), Y(p.points[0][1]), 2.4, {
      class: "start",
      fill: "#000000",
    });
  }

  return doc.toString();
}

export function plotPaths(file: string, rho2 = 3.0, title?: string): string {
  return renderPaths(loadPaths(file), rho2, title);
}
