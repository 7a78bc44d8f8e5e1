import { readFileSync } from "node:fs";
import { basename } from "node:path";

import { parse } from "csv-parse/sync";

import { EmptyTableError, SchemaError } from "./errors.js";

export interface ColumnSpec {
  name: string;
  type: "number" | "string";
  /** Empty cells become null instead of erroring (aggregates over failed trials). */
  optional?: boolean;
}

export type Cell = number | string | null;

export interface Table {
  columns: string[];
  rows: Record<string, Cell>[];
}

/**
 * Read a CSV file and check it against an expected column layout.
 *
 * Every diagnostic names the offending column so a producer/consumer version
 * skew is immediately attributable. Header order must match the declared order:
 * the files are machine-written, so a reordering signals a different writer.
 */
export function readTable(path: string, spec: ColumnSpec[]): Table {
  const label = basename(path);
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new SchemaError(`${label}: file not found at ${path}`);
  }
  if (text.trim() === "") {
    throw new EmptyTableError(`${label} is empty (no header, no rows)`);
  }

  let records: string[][];
  try {
    records = parse(text, { skip_empty_lines: true }) as string[][];
  } catch (e) {
    throw new SchemaError(`${label}: ${(e as Error).message}`);
  }

  const header = records[0] ?? [];
  checkHeader(label, header, spec);

  const body = records.slice(1);
  if (body.length === 0) {
    throw new EmptyTableError(`${label} has a header but no data rows`);
  }

  const rows: Record<string, Cell>[] = [];
  for (let r = 0; r < body.length; r++) {
    const cells = body[r]!;
    if (cells.length !== spec.length) {
      throw new SchemaError(
        `${label}: data row ${r + 1} has ${cells.length} cells, expected ${spec.length}`
      );
    }
    const row: Record<string, Cell> = {};
    for (let c = 0; c < spec.length; c++) {
      const col = spec[c]!;
      row[col.name] = coerce(label, col, cells[c]!, r + 1);
    }
    rows.push(row);
  }
  return { columns: spec.map((c) => c.name), rows };
}

function checkHeader(label: string, header: string[], spec: ColumnSpec[]): void {
  const expected = spec.map((c) => c.name);
  for (const name of expected) {
    if (!header.includes(name)) {
      throw new SchemaError(`${label}: missing column "${name}"`);
    }
  }
  for (const name of header) {
    if (!expected.includes(name)) {
      throw new SchemaError(`${label}: unexpected column "${name}"`);
    }
  }
  for (let i = 0; i < expected.length; i++) {
    if (header[i] !== expected[i]) {
      throw new SchemaError(
        `${label}: column "${expected[i]}" expected at position ${i + 1}, found "${header[i]}"`
      );
    }
  }
}

function coerce(label: string, col: ColumnSpec, cell: string, rowNum: number): Cell {
  const trimmed = cell.trim();
  if (col.type === "string") {
    return trimmed;
  }
  if (trimmed === "") {
    if (col.optional) return null;
    throw new SchemaError(`${label}: column "${col.name}" is empty at data row ${rowNum}`);
  }
  const value = Number(trimmed);
  if (!Number.isFinite(value)) {
    throw new SchemaError(
      `${label}: column "${col.name}" has non-numeric value "${trimmed}" at data row ${rowNum}`
    );
  }
  return value;
}
