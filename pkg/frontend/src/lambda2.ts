/**
 * Connectivity-versus-time figure: one curve per run, log-scaled step axis.
 */

import path from "path";

import { column, readTable, SchemaError } from "./csv";
import { colorFor, drawAxes, drawLegend, FRAME, padRange, SvgDoc } from "./svg";

export interface Lambda2Series {
  label: string;
  k: number[];
  lambda2: number[];
}

/** Default label: parent directory for artifact files, file stem otherwise. */
export function defaultLabel(file: string): string {
  const stem = path.basename(file).replace(/\.[^.]*$/, "");
  if (stem === "steps" || stem === "trajectory") {
    return path.basename(path.dirname(file)) || stem;
  }
  return stem;
}

/**
 * Load the curves. Each file must be a steps table with k and
 * lambda2_actual columns; k must be positive (the axis is logarithmic).
 */
export function loadLambda2Series(files: string[], labels?: string[]): Lambda2Series[] {
  if (files.length === 0) {
    throw new SchemaError("at least one steps file is required");
  }
  if (labels && labels.length !== files.length) {
    throw new SchemaError(`${labels.length} labels for ${files.length} files`);
  }
  return files.map((f, i) => {
    const table = readTable(f, ["k", "lambda2_actual"]);
    const k = column(table, "k", f);
    const lambda2 = column(table, "lambda2_actual", f);
    if (k.some((v) => v <= 0)) {
      throw new SchemaError(`${f}: step index must be positive for the log axis`);
    }
    return { label: labels ? labels[i] : defaultLabel(f), k, lambda2 };
  });
}

export function renderLambda2(series: Lambda2Series[], title = "Algebraic connectivity"): string {
  const allK = series.flatMap((s) => s.k);
  const allY = series.flatMap((s) => s.lambda2);
  // 5% margins; the k axis pads in log space to keep decades visually even
  const [lk0, lk1] = padRange(
    Math.log10(Math.min(...allK)),
    Math.log10(Math.max(...allK))
  );
  const [y0, y1] = padRange(Math.min(...allY), Math.max(...allY));

  const doc = new SvgDoc(FRAME.w, FRAME.h);
  const { X, Y } = drawAxes(
    doc,
    FRAME,
    { min: Math.pow(10, lk0), max: Math.pow(10, lk1), label: "step k", log: true },
    { min: y0, max: y1, label: "algebraic connectivity" },
    title
  );

  series.forEach((s, i) => {
    const pts = s.k.map((k, j) => [X(k), Y(s.lambda2[j])] as [number, number]);
    doc.polyline(pts, {
      class: "curve",
      stroke: colorFor(i),
      "stroke-width": 1.6,
    });
  });

  drawLegend(
    doc,
    FRAME,
    series.map((s, i) => ({ label: s.label, color: colorFor(i) }))
  );
  return doc.toString();
}

export function plotLambda2(files: string[], labels?: string[], title?: string): string {
  return renderLambda2(loadLambda2Series(files, labels), title);
}
