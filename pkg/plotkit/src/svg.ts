import { EmptyTableError } from "./errors.js";
import type { SourceMark } from "./manifest.js";

/*
 * Minimal SVG chart builders. Output is deterministic: same inputs give
 * byte-identical files, so re-rendering a results directory is a no-op diff.
 */

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#ff7f0e",
  "#9467bd",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
  "#bcbd22",
  "#e377c2",
];

const FONT = 'font-family="Helvetica, Arial, sans-serif"';

function fmt(v: number): string {
  return v.toFixed(2).replace(/\.00$/, "");
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Short label for a tick value: plain decimal, or 1e-3 form on log axes. */
function tickLabel(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    if (e >= -2 && e <= 3) return String(Number(v.toPrecision(3)));
    return `1e${e}`;
  }
  return String(Number(v.toPrecision(6)));
}

interface Scale {
  map: (v: number) => number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.5;
    lo -= pad;
    hi += pad;
  }
  const span = hi - lo;
  // pad 4% so points do not sit on the frame
  const dLo = lo - span * 0.04;
  const dHi = hi + span * 0.04;
  const step = niceStep((dHi - dLo) / 6);
  const ticks: number[] = [];
  for (let t = Math.ceil(dLo / step) * step; t <= dHi + step * 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return {
    map: (v) => rLo + ((v - dLo) / (dHi - dLo)) * (rHi - rLo),
    ticks,
  };
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const frac = raw / mag;
  if (frac <= 1) return mag;
  if (frac <= 2) return 2 * mag;
  if (frac <= 5) return 5 * mag;
  return 10 * mag;
}

function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  let eLo = Math.floor(Math.log10(lo));
  let eHi = Math.ceil(Math.log10(hi));
  if (eLo === eHi) {
    eLo -= 1;
    eHi += 1;
  }
  const stride = Math.max(1, Math.ceil((eHi - eLo) / 8));
  const ticks: number[] = [];
  for (let e = eLo; e <= eHi; e += stride) {
    ticks.push(Math.pow(10, e));
  }
  return {
    map: (v) => rLo + ((Math.log10(v) - eLo) / (eHi - eLo)) * (rHi - rLo),
    ticks,
  };
}

export interface SeriesPoint {
  x: number;
  y: number;
  /** Optional symmetric spread drawn as a vertical whisker. */
  yerr?: number | null;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
}

export interface LineChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY?: boolean;
  width?: number;
  height?: number;
}

/**
 * Render one or more series as a line chart with a legend.
 *
 * On a log axis, points with non-positive y are unplottable and are dropped;
 * if that leaves nothing at all, the chart refuses to render an empty frame.
 */
export function lineChart(allSeries: Series[], opts: LineChartOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 480;
  const m = { left: 70, right: 24, top: 40, bottom: 56 };
  const logY = opts.logY ?? false;

  const kept: Series[] = allSeries
    .map((s) => ({
      label: s.label,
      points: s.points.filter(
        (p) => Number.isFinite(p.x) && Number.isFinite(p.y) && (!logY || p.y > 0)
      ),
    }))
    .filter((s) => s.points.length > 0);
  if (kept.length === 0) {
    throw new EmptyTableError(`"${opts.title}": no plottable points`);
  }

  const xs = kept.flatMap((s) => s.points.map((p) => p.x));
  const ys = kept.flatMap((s) => s.points.map((p) => p.y));
  const sx = linearScale(Math.min(...xs), Math.max(...xs), m.left, width - m.right);
  const sy = logY
    ? logScale(Math.min(...ys), Math.max(...ys), height - m.bottom, m.top)
    : linearScale(Math.min(...ys), Math.max(...ys), height - m.bottom, m.top);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`
  );
  out.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  out.push(
    `<text x="${fmt(width / 2)}" y="22" ${FONT} font-size="15" text-anchor="middle">${escapeXml(
      opts.title
    )}</text>`
  );

  // grid + ticks
  for (const t of sx.ticks) {
    const x = fmt(sx.map(t));
    out.push(
      `<line x1="${x}" y1="${m.top}" x2="${x}" y2="${height - m.bottom}" stroke="#e3e3e3"/>`
    );
    out.push(
      `<text x="${x}" y="${height - m.bottom + 18}" ${FONT} font-size="11" text-anchor="middle">${tickLabel(
        t,
        false
      )}</text>`
    );
  }
  for (const t of sy.ticks) {
    const y = fmt(sy.map(t));
    out.push(
      `<line x1="${m.left}" y1="${y}" x2="${width - m.right}" y2="${y}" stroke="#e3e3e3"/>`
    );
    out.push(
      `<text x="${m.left - 6}" y="${y}" ${FONT} font-size="11" text-anchor="end" dominant-baseline="middle">${tickLabel(
        t,
        logY
      )}</text>`
    );
  }
  out.push(
    `<rect x="${m.left}" y="${m.top}" width="${width - m.left - m.right}" height="${
      height - m.top - m.bottom
    }" fill="none" stroke="#333333"/>`
  );
  out.push(
    `<text x="${fmt((m.left + width - m.right) / 2)}" y="${height - 12}" ${FONT} font-size="13" text-anchor="middle">${escapeXml(
      opts.xLabel
    )}</text>`
  );
  out.push(
    `<text x="18" y="${fmt((m.top + height - m.bottom) / 2)}" ${FONT} font-size="13" text-anchor="middle" transform="rotate(-90 18 ${fmt(
      (m.top + height - m.bottom) / 2
    )})">${escapeXml(opts.yLabel)}</text>`
  );

  kept.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const pts = s.points
      .map((p) => `${fmt(sx.map(p.x))},${fmt(sy.map(p.y))}`)
      .join(" ");
    out.push(`<g class="series" data-label="${escapeXml(s.label)}">`);
    for (const p of s.points) {
      if (p.yerr == null || p.yerr <= 0) continue;
      const hi = p.y + p.yerr;
      const lo = p.y - p.yerr;
      if (logY && lo <= 0) continue; // lower whisker would leave the axis
      const x = fmt(sx.map(p.x));
      out.push(
        `<line x1="${x}" y1="${fmt(sy.map(lo))}" x2="${x}" y2="${fmt(
          sy.map(hi)
        )}" stroke="${color}" stroke-width="1" opacity="0.6"/>`
      );
    }
    out.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"/>`
    );
    for (const p of s.points) {
      out.push(
        `<circle cx="${fmt(sx.map(p.x))}" cy="${fmt(sy.map(p.y))}" r="3" fill="${color}"/>`
      );
    }
    out.push("</g>");
  });

  // legend, top-right inside the frame
  const legendW = 10 + 8 * Math.max(...kept.map((s) => s.label.length)) + 34;
  const lx = width - m.right - legendW - 6;
  const ly = m.top + 8;
  out.push(`<g class="legend">`);
  out.push(
    `<rect x="${lx}" y="${ly}" width="${legendW}" height="${
      kept.length * 17 + 8
    }" fill="#ffffff" opacity="0.88" stroke="#999999"/>`
  );
  kept.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const yy = ly + 16 + i * 17;
    out.push(
      `<line x1="${lx + 6}" y1="${yy - 4}" x2="${lx + 28}" y2="${yy - 4}" stroke="${color}" stroke-width="2"/>`
    );
    out.push(
      `<text x="${lx + 34}" y="${yy}" ${FONT} font-size="11">${escapeXml(s.label)}</text>`
    );
  });
  out.push("</g>");
  out.push("</svg>");
  out.push("");
  return out.join("\n");
}

/* ---------------------------------------------------------------- heatmap */

// dark-to-bright perceptual ramp (viridis-like stops)
const RAMP: [number, string][] = [
  [0.0, "#440154"],
  [0.25, "#3b528b"],
  [0.5, "#21918c"],
  [0.75, "#5ec962"],
  [1.0, "#fde725"],
];

function rampColor(t: number): string {
  const u = Math.min(1, Math.max(0, t));
  for (let i = 1; i < RAMP.length; i++) {
    const [t1, c1] = RAMP[i]!;
    if (u <= t1) {
      const [t0, c0] = RAMP[i - 1]!;
      const w = (u - t0) / (t1 - t0);
      return mixHex(c0, c1, w);
    }
  }
  return RAMP[RAMP.length - 1]![1];
}

function mixHex(a: string, b: string, w: number): string {
  const pa = [1, 3, 5].map((i) => parseInt(a.slice(i, i + 2), 16));
  const pb = [1, 3, 5].map((i) => parseInt(b.slice(i, i + 2), 16));
  const mixed = pa.map((va, i) => Math.round(va + (pb[i]! - va) * w));
  return `#${mixed.map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}

export interface HeatmapCell {
  x: number;
  y: number;
  v: number;
}

export interface HeatmapOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  /** Values below this are clipped to it; it anchors the dark end. */
  floor: number;
  /** Top of the color scale. */
  ceil: number;
  unit: string;
  marks?: SourceMark[];
  width?: number;
  height?: number;
}

/**
 * Dense rectangular heatmap over scattered (x, y, v) samples that must cover
 * a full grid. Marks are drawn on top: an asterisk for the desired source,
 * an X cross for each interferer.
 */
export function heatmap(cells: HeatmapCell[], opts: HeatmapOptions): string {
  if (cells.length === 0) {
    throw new EmptyTableError(`"${opts.title}": no cells to draw`);
  }
  const xs = uniqueSorted(cells.map((c) => c.x));
  const ys = uniqueSorted(cells.map((c) => c.y));
  if (cells.length !== xs.length * ys.length) {
    throw new EmptyTableError(
      `"${opts.title}": ${cells.length} samples do not fill the ${xs.length}x${ys.length} grid`
    );
  }

  const width = opts.width ?? 640;
  const height = opts.height ?? 560;
  const m = { left: 64, right: 96, top: 40, bottom: 52 };
  const plotW = width - m.left - m.right;
  const plotH = height - m.top - m.bottom;
  const cw = plotW / xs.length;
  const ch = plotH / ys.length;
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));

  // cell centers -> pixel centers; y runs upward
  const px = (x: number) => m.left + (xIndex.get(x)! + 0.5) * cw;
  const py = (y: number) => m.top + plotH - (yIndex.get(y)! + 0.5) * ch;

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`
  );
  out.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  out.push(
    `<text x="${fmt(width / 2)}" y="22" ${FONT} font-size="15" text-anchor="middle">${escapeXml(
      opts.title
    )}</text>`
  );

  const span = opts.ceil - opts.floor;
  out.push(`<g class="cells" shape-rendering="crispEdges">`);
  for (const c of cells) {
    const clipped = Math.min(opts.ceil, Math.max(opts.floor, c.v));
    const color = rampColor((clipped - opts.floor) / span);
    out.push(
      `<rect x="${fmt(px(c.x) - cw / 2)}" y="${fmt(py(c.y) - ch / 2)}" width="${fmt(
        cw + 0.5
      )}" height="${fmt(ch + 0.5)}" fill="${color}"/>`
    );
  }
  out.push("</g>");

  // axis ticks on the data coordinates
  const xTicks = pickTicks(xs);
  const yTicks = pickTicks(ys);
  for (const t of xTicks) {
    out.push(
      `<text x="${fmt(px(t))}" y="${height - m.bottom + 18}" ${FONT} font-size="11" text-anchor="middle">${tickLabel(
        t,
        false
      )}</text>`
    );
  }
  for (const t of yTicks) {
    out.push(
      `<text x="${m.left - 6}" y="${fmt(py(t))}" ${FONT} font-size="11" text-anchor="end" dominant-baseline="middle">${tickLabel(
        t,
        false
      )}</text>`
    );
  }
  out.push(
    `<rect x="${m.left}" y="${m.top}" width="${fmt(plotW)}" height="${fmt(
      plotH
    )}" fill="none" stroke="#333333"/>`
  );
  out.push(
    `<text x="${fmt(m.left + plotW / 2)}" y="${height - 12}" ${FONT} font-size="13" text-anchor="middle">${escapeXml(
      opts.xLabel
    )}</text>`
  );
  out.push(
    `<text x="16" y="${fmt(m.top + plotH / 2)}" ${FONT} font-size="13" text-anchor="middle" transform="rotate(-90 16 ${fmt(
      m.top + plotH / 2
    )})">${escapeXml(opts.yLabel)}</text>`
  );

  for (const mark of opts.marks ?? []) {
    out.push(sourceMarker(markX(mark.p, xs, px), markY(mark.q, ys, py), mark.desired));
  }

  out.push(colorbar(width - m.right + 16, m.top, 18, plotH, opts));
  out.push("</svg>");
  out.push("");
  return out.join("\n");
}

/** Nearest-pixel position for a mark, even between cell centers. */
function markX(p: number, xs: number[], px: (x: number) => number): number {
  const lo = xs[0]!;
  const hi = xs[xs.length - 1]!;
  if (hi === lo) return px(lo);
  const x0 = px(lo);
  const x1 = px(hi);
  return x0 + ((p - lo) / (hi - lo)) * (x1 - x0);
}

function markY(q: number, ys: number[], py: (y: number) => number): number {
  const lo = ys[0]!;
  const hi = ys[ys.length - 1]!;
  if (hi === lo) return py(lo);
  const y0 = py(lo);
  const y1 = py(hi);
  return y0 + ((q - lo) / (hi - lo)) * (y1 - y0);
}

function sourceMarker(x: number, y: number, desired: boolean): string {
  const cls = desired ? "marker marker-desired" : "marker marker-interferer";
  const r = desired ? 8 : 6;
  const strokes: string[] = [];
  const rays: [number, number][] = desired
    ? [0, 60, 120].map((deg) => [deg, r])
    : [45, 135].map((deg) => [deg, r]);
  for (const [deg, len] of rays) {
    const a = (deg * Math.PI) / 180;
    const dx = Math.cos(a) * len;
    const dy = Math.sin(a) * len;
    strokes.push(
      `M ${fmt(x - dx)} ${fmt(y - dy)} L ${fmt(x + dx)} ${fmt(y + dy)}`
    );
  }
  const d = strokes.join(" ");
  const fg = desired ? "#ffffff" : "#ff4040";
  return (
    `<g class="${cls}">` +
    `<path d="${d}" stroke="#000000" stroke-width="4.5" fill="none" stroke-linecap="round"/>` +
    `<path d="${d}" stroke="${fg}" stroke-width="2" fill="none" stroke-linecap="round"/>` +
    `</g>`
  );
}

function colorbar(x: number, y: number, w: number, h: number, opts: HeatmapOptions): string {
  const steps = 48;
  const out: string[] = [`<g class="colorbar" shape-rendering="crispEdges">`];
  for (let i = 0; i < steps; i++) {
    // top of the bar is the ceiling value
    const t = 1 - i / (steps - 1);
    out.push(
      `<rect x="${x}" y="${fmt(y + (i * h) / steps)}" width="${w}" height="${fmt(
        h / steps + 0.5
      )}" fill="${rampColor(t)}"/>`
    );
  }
  out.push(
    `<rect x="${x}" y="${y}" width="${w}" height="${h}" fill="none" stroke="#333333"/>`
  );
  const span = opts.ceil - opts.floor;
  const nLabels = 5;
  for (let i = 0; i < nLabels; i++) {
    const v = opts.ceil - (i * span) / (nLabels - 1);
    const yy = y + (i * h) / (nLabels - 1);
    const text = v === opts.floor ? `≤ ${v}` : String(v);
    out.push(
      `<text x="${x + w + 5}" y="${fmt(yy)}" ${FONT} font-size="11" dominant-baseline="middle">${escapeXml(
        text
      )}</text>`
    );
  }
  out.push(
    `<text x="${x + w / 2}" y="${y - 8}" ${FONT} font-size="11" text-anchor="middle">${escapeXml(
      opts.unit
    )}</text>`
  );
  out.push("</g>");
  return out.join("\n");
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

/** At most ~7 tick positions picked from actual grid coordinates. */
function pickTicks(values: number[]): number[] {
  const stride = Math.max(1, Math.round(values.length / 6));
  const ticks: number[] = [];
  for (let i = 0; i < values.length; i += stride) {
    ticks.push(values[i]!);
  }
  const last = values[values.length - 1]!;
  if (ticks[ticks.length - 1] !== last) ticks.push(last);
  return ticks;
}
