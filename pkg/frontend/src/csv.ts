/**
 * Minimal CSV reading for the simulator's artifact files.
 *
 * The producer writes plain comma-separated values with a single header
 * row and no quoting (the only non-numeric cell, `statuses`, never
 * contains commas), so a split-based parser is exact here.
 */

import { readFileSync } from "fs";

/** Raised when an input file does not match the artifact contract. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

/**
 * Read a CSV file and validate that every required column is present.
 *
 * A file with no data rows is rejected: every artifact the simulator
 * writes has at least one row, so an empty table means the caller is
 * pointing at the wrong file.
 */
export function readTable(path: string, required: string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const missing = required.filter((c) => !columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: missing columns ${missing.join(", ")}`);
  }
  if (lines.length === 1) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i + 1} has ${cells.length} cells, expected ${columns.length}`
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => (row[c] = cells[j]));
    return row;
  });
  return { columns, rows };
}

/** Numeric view of one column. Non-numeric cells are a schema violation. */
export function column(table: Table, name: string, path = "<table>"): number[] {
  return table.rows.map((r, i) => {
    const v = Number(r[name]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`${path}: column ${name}, row ${i + 1}: not a number (${r[name]})`);
    }
    return v;
  });
}
