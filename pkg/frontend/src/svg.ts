/**
 * Deterministic SVG chart primitives.
 *
 * Everything that ends up in an output file is derived from the input
 * data alone: fixed canvas size, fixed fonts, fixed palette, fixed
 * number formatting, no timestamps. Rendering the same tables twice
 * must produce byte-identical files.
 */

export const FONT = "Helvetica, Arial, sans-serif";

export const PALETTE = [
  "#4361ee",
  "#e63946",
  "#2d6a4f",
  "#f3722c",
  "#7209b7",
  "#0096c7",
  "#b5179e",
  "#606c38",
  "#d62828",
  "#433559",
];

export function colorFor(i: number): string {
  return PALETTE[i % PALETTE.length];
}

export interface Frame {
  w: number;
  h: number;
  ml: number;
  mr: number;
  mt: number;
  mb: number;
}

export const FRAME: Frame = { w: 720, h: 440, ml: 64, mr: 20, mt: 42, mb: 50 };

export function plotRect(f: Frame) {
  return { x: f.ml, y: f.mt, w: f.w - f.ml - f.mr, h: f.h - f.mt - f.mb };
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Coordinate formatting: two decimals is below visual resolution. */
export function fmt(x: number): string {
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Tick label formatting, stable across runs. */
export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(1).replace("e+", "e").replace(/e(-?)0*(\d)/, "e$1$2");
  }
  return String(Number(v.toPrecision(6)));
}

/** Widen [lo, hi] by 5% on each side; degenerate spans get a unit-scaled pad. */
export function padRange(lo: number, hi: number): [number, number] {
  if (!(hi > lo)) {
    const pad = Math.max(Math.abs(lo), 1) * 0.05;
    return [lo - pad, hi + pad];
  }
  const m = (hi - lo) * 0.05;
  return [lo - m, hi + m];
}

/** Ticks on a 1/2/5 ladder covering [min, max]. */
export function linTicks(min: number, max: number, count = 6): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const out: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

/** Ticks at 1/2/5 per decade for a log axis over positive values. */
export function logTicks(min: number, max: number): number[] {
  const out: number[] = [];
  const d0 = Math.floor(Math.log10(min));
  const d1 = Math.ceil(Math.log10(max));
  for (let d = d0; d <= d1; d++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, d);
      if (v >= min * (1 - 1e-12) && v <= max * (1 + 1e-12)) out.push(v);
    }
  }
  return out;
}

type Attrs = Record<string, string | number>;

function attrStr(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly w: number, readonly h: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${w} ${h}" ` +
        `width="${w}" height="${h}" font-family="${FONT}">`
    );
    this.parts.push(`<rect width="${w}" height="${h}" fill="#ffffff"/>`);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}"${attrStr(attrs)}/>`
    );
  }

  polyline(pts: Array<[number, number]>, attrs: Attrs): void {
    const p = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline fill="none"${attrStr(attrs)} points="${p}"/>`);
  }

  circle(cx: number, cy: number, r: number, attrs: Attrs): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}"${attrStr(attrs)}/>`);
  }

  rect(x: number, y: number, w: number, h: number, attrs: Attrs): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}"${attrStr(attrs)}/>`
    );
  }

  text(x: number, y: number, s: string, attrs: Attrs): void {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}"${attrStr(attrs)}>${esc(s)}</text>`);
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface AxisSpec {
  min: number;
  max: number;
  label: string;
  log?: boolean;
}

/**
 * Draw title, frame, grid, ticks and axis labels; return data-to-pixel maps.
 * Log axes expect strictly positive min/max.
 */
export function drawAxes(
  doc: SvgDoc,
  frame: Frame,
  xAxis: AxisSpec,
  yAxis: AxisSpec,
  title: string
): { X: (v: number) => number; Y: (v: number) => number } {
  const r = plotRect(frame);
  const xt = xAxis.log ? (v: number) => Math.log10(v) : (v: number) => v;
  const yt = yAxis.log ? (v: number) => Math.log10(v) : (v: number) => v;
  const x0 = xt(xAxis.min);
  const x1 = xt(xAxis.max);
  const y0 = yt(yAxis.min);
  const y1 = yt(yAxis.max);
  const X = (v: number) => r.x + ((xt(v) - x0) / (x1 - x0 || 1)) * r.w;
  const Y = (v: number) => r.y + r.h - ((yt(v) - y0) / (y1 - y0 || 1)) * r.h;

  doc.text(frame.ml, frame.mt - 16, title, {
    "font-size": 13,
    "font-weight": 600,
    fill: "#222222",
  });

  const xTicks = xAxis.log ? logTicks(xAxis.min, xAxis.max) : linTicks(xAxis.min, xAxis.max);
  const yTicks = yAxis.log ? logTicks(yAxis.min, yAxis.max) : linTicks(yAxis.min, yAxis.max);

  for (const v of yTicks) {
    doc.line(r.x, Y(v), r.x + r.w, Y(v), { stroke: "#eeeeee", "stroke-width": 0.6 });
  }
  for (const v of xTicks) {
    doc.line(X(v), r.y, X(v), r.y + r.h, { stroke: "#f3f3f3", "stroke-width": 0.6 });
  }

  doc.line(r.x, r.y, r.x, r.y + r.h, { stroke: "#333333", "stroke-width": 0.8 });
  doc.line(r.x, r.y + r.h, r.x + r.w, r.y + r.h, { stroke: "#333333", "stroke-width": 0.8 });

  for (const v of xTicks) {
    doc.line(X(v), r.y + r.h, X(v), r.y + r.h + 4, { stroke: "#333333", "stroke-width": 0.6 });
    doc.text(X(v), r.y + r.h + 15, fmtTick(v), {
      "text-anchor": "middle",
      "font-size": 9,
      fill: "#555555",
    });
  }
  for (const v of yTicks) {
    doc.line(r.x - 4, Y(v), r.x, Y(v), { stroke: "#333333", "stroke-width": 0.6 });
    doc.text(r.x - 7, Y(v) + 3, fmtTick(v), {
      "text-anchor": "end",
      "font-size": 9,
      fill: "#555555",
    });
  }

  doc.text(r.x + r.w / 2, frame.h - 10, xAxis.label, {
    "text-anchor": "middle",
    "font-size": 11,
    fill: "#333333",
  });
  const ly = r.y + r.h / 2;
  doc.text(16, ly, yAxis.label, {
    "text-anchor": "middle",
    "font-size": 11,
    fill: "#333333",
    transform: `rotate(-90,16,${fmt(ly)})`,
  });

  return { X, Y };
}

export interface LegendEntry {
  label: string;
  color: string;
  width?: number;
}

/** Legend box in the top-left corner of the plot area. */
export function drawLegend(doc: SvgDoc, frame: Frame, entries: LegendEntry[]): void {
  if (entries.length === 0) return;
  const r = plotRect(frame);
  const lw = Math.max(...entries.map((e) => e.label.length)) * 5.4 + 30;
  const lh = entries.length * 13 + 8;
  const bx = r.x + 8;
  const by = r.y + 8;
  doc.rect(bx, by, lw, lh, {
    fill: "#ffffff",
    "fill-opacity": 0.88,
    stroke: "#cccccc",
    "stroke-width": 0.5,
    rx: 2,
  });
  entries.forEach((e, i) => {
    const y = by + 12 + i * 13;
    doc.line(bx + 6, y - 3, bx + 22, y - 3, {
      stroke: e.color,
      "stroke-width": e.width ?? 1.6,
    });
    doc.text(bx + 26, y, e.label, { "font-size": 9, fill: "#333333" });
  });
}
