import { mkdirSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import { readTable, type Cell, type ColumnSpec, type Table } from "./csv.js";
import { EmptyTableError, SchemaError } from "./errors.js";
import type { Manifest, SourceMark } from "./manifest.js";
import { heatmap, lineChart, type Series } from "./svg.js";

export type FigureKind =
  | "ber_vs_snr"
  | "ber_vs_rho"
  | "cond_vs_rho"
  | "flops_vs_size"
  | "array_factor";

/** Everything needed to turn one CSV into one image. */
export interface FigureSpec {
  kind: FigureKind;
  /** Absolute path of the input table. */
  csv: string;
  /** Absolute path of the SVG to (over)write. */
  out: string;
  title: string;
  /** Source positions overlaid on array-factor maps. */
  marks?: SourceMark[];
}

const BER_COLUMNS: ColumnSpec[] = [
  { name: "snr_db", type: "number" },
  { name: "method", type: "string" },
  // empty when every trial at this point failed
  { name: "mean_ber", type: "number", optional: true },
  { name: "stderr_ber", type: "number", optional: true },
  { name: "trials", type: "number" },
  { name: "failures", type: "number" },
];

const COND_COLUMNS: ColumnSpec[] = [
  { name: "snr_db", type: "number" },
  { name: "rho", type: "number" },
  { name: "axis", type: "string" },
  { name: "cond", type: "number" },
];

const FLOPS_COLUMNS: ColumnSpec[] = [
  { name: "n_h", type: "number" },
  { name: "n_v", type: "number" },
  { name: "method", type: "string" },
  { name: "flops", type: "number" },
];

const AF_COLUMNS: ColumnSpec[] = [
  { name: "p", type: "number" },
  { name: "q", type: "number" },
  { name: "af_db", type: "number" },
];

export const TABLE_COLUMNS: Record<FigureKind, ColumnSpec[]> = {
  ber_vs_snr: BER_COLUMNS,
  ber_vs_rho: BER_COLUMNS,
  cond_vs_rho: COND_COLUMNS,
  flops_vs_size: FLOPS_COLUMNS,
  array_factor: AF_COLUMNS,
};

/** Map every manifest output to the figure it should become. */
export function planFigures(manifest: Manifest, dir: string, outDir: string): FigureSpec[] {
  const specs: FigureSpec[] = [];
  for (const output of manifest.outputs) {
    const kind = output.kind as FigureKind;
    if (!(kind in TABLE_COLUMNS)) {
      throw new SchemaError(`manifest output "${output.path}" has unknown kind "${output.kind}"`);
    }
    const stem = basename(output.path).replace(/\.csv$/, "");
    specs.push({
      kind,
      csv: join(dir, output.path),
      out: join(outDir, `${stem}.svg`),
      title: titleFor(kind, output.surface, manifest),
      marks: kind === "array_factor" ? manifest.directions : undefined,
    });
  }
  return specs;
}

function titleFor(kind: FigureKind, surface: string | undefined, manifest: Manifest): string {
  switch (kind) {
    case "ber_vs_snr":
      return "BER vs SNR by method";
    case "ber_vs_rho":
      return "BER vs SNR by diagonal loading";
    case "cond_vs_rho":
      return "Covariance conditioning vs diagonal loading";
    case "flops_vs_size":
      return "Design cost vs array size";
    case "array_factor":
      return `Array factor: ${surface ?? manifest.experiment}`;
  }
}

/** Render one spec to disk. Returns the path written. */
export function renderFigure(spec: FigureSpec): string {
  const table = readTable(spec.csv, TABLE_COLUMNS[spec.kind]);
  let svg: string;
  switch (spec.kind) {
    case "ber_vs_snr":
    case "ber_vs_rho":
      svg = berChart(table, spec.title);
      break;
    case "cond_vs_rho":
      svg = condChart(table, spec.title);
      break;
    case "flops_vs_size":
      svg = flopsChart(table, spec.title);
      break;
    case "array_factor":
      svg = afMap(table, spec);
      break;
  }
  writeFileSync(spec.out, svg);
  return spec.out;
}

/** Render every figure of a run; creates the output directory. */
export function renderAll(manifest: Manifest, dir: string, outDir: string): string[] {
  mkdirSync(outDir, { recursive: true });
  return planFigures(manifest, dir, outDir).map(renderFigure);
}

// readTable guarantees every spec column exists on every row
function num(cell: Cell | undefined): number {
  return cell as number;
}

/** Group rows by a label column, preserving first-appearance order. */
function groupBy(table: Table, key: (row: Record<string, Cell>) => string): Map<string, Record<string, Cell>[]> {
  const groups = new Map<string, Record<string, Cell>[]>();
  for (const row of table.rows) {
    const label = key(row);
    const bucket = groups.get(label);
    if (bucket) bucket.push(row);
    else groups.set(label, [row]);
  }
  return groups;
}

function berChart(table: Table, title: string): string {
  const series: Series[] = [];
  for (const [label, rows] of groupBy(table, (r) => String(r["method"]))) {
    series.push({
      label,
      points: rows
        .filter((r) => r["mean_ber"] !== null)
        .map((r) => ({
          x: num(r["snr_db"]),
          y: num(r["mean_ber"]),
          yerr: r["stderr_ber"] === null ? null : num(r["stderr_ber"]),
        })),
    });
  }
  return lineChart(series, { title, xLabel: "SNR (dB)", yLabel: "mean BER", logY: true });
}

function condChart(table: Table, title: string): string {
  const series: Series[] = [];
  const groups = groupBy(table, (r) => `${r["axis"]} axis, ${r["snr_db"]} dB`);
  for (const [label, rows] of groups) {
    series.push({
      label,
      points: rows.map((r) => ({ x: num(r["rho"]), y: num(r["cond"]) })),
    });
  }
  return lineChart(series, {
    title,
    xLabel: "diagonal loading ρ",
    yLabel: "condition number",
    logY: true,
  });
}

function flopsChart(table: Table, title: string): string {
  const series: Series[] = [];
  for (const [label, rows] of groupBy(table, (r) => String(r["method"]))) {
    series.push({
      label,
      points: rows.map((r) => ({ x: num(r["n_h"]) * num(r["n_v"]), y: num(r["flops"]) })),
    });
  }
  return lineChart(series, {
    title,
    xLabel: "array elements",
    yLabel: "flops per design",
    logY: true,
  });
}

// color floor for the maps; deeper nulls exist but add nothing visually
const AF_FLOOR_DB = -40;

function afMap(table: Table, spec: FigureSpec): string {
  const cells = table.rows.map((r) => ({
    x: num(r["p"]),
    y: num(r["q"]),
    v: num(r["af_db"]),
  }));
  return heatmap(cells, {
    title: spec.title,
    xLabel: "p (horizontal direction cosine)",
    yLabel: "q (vertical direction cosine)",
    floor: AF_FLOOR_DB,
    ceil: 0,
    unit: "dB",
    marks: spec.marks,
  });
}
