/**
 * Scatter chart: one marker per CSV row, grouped (color + shape + legend)
 * by mechanism.  Pure function of the table, so a fixed CSV always yields
 * byte-identical SVG.
 */

import { numeric, requireColumns, ResultTable } from "./csv.js";

export interface ChartOptions {
  x: string;
  y: string;
  group?: string; // defaults to "mechanism"
  title?: string;
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 42, right: 24, bottom: 46, left: 62 };
const TICKS = 5;

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(3).replace(/0+$/, "").replace(/\.$/, "");
}

function pos(v: number): string {
  return v.toFixed(2);
}

interface Scale {
  lo: number;
  hi: number;
  map: (v: number) => number;
}

function makeScale(values: number[], from: number, to: number): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (values.length === 0) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    // degenerate domain: pad so the single value sits mid-axis
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * 0.06;
  lo -= pad;
  hi += pad;
  return { lo, hi, map: (v) => from + ((v - lo) / (hi - lo)) * (to - from) };
}

function marker(shape: number, cx: number, cy: number, color: string): string {
  const x = pos(cx);
  const y = pos(cy);
  switch (shape % 4) {
    case 0:
      return `<circle cx="${x}" cy="${y}" r="4" fill="${color}"/>`;
    case 1:
      return `<rect x="${pos(cx - 3.5)}" y="${pos(cy - 3.5)}" width="7" height="7" fill="${color}"/>`;
    case 2:
      return `<path d="M ${x} ${pos(cy - 4.5)} L ${pos(cx + 4)} ${pos(cy + 3.5)} L ${pos(cx - 4)} ${pos(cy + 3.5)} Z" fill="${color}"/>`;
    default:
      return `<path d="M ${x} ${pos(cy - 4.5)} L ${pos(cx + 4.5)} ${y} L ${x} ${pos(cy + 4.5)} L ${pos(cx - 4.5)} ${y} Z" fill="${color}"/>`;
  }
}

export function buildScatter(table: ResultTable, opts: ChartOptions): string {
  const group = opts.group ?? "mechanism";
  requireColumns(table, [opts.x, opts.y, group]);
  const width = opts.width ?? 640;
  const height = opts.height ?? 440;
  const xs = numeric(table, opts.x);
  const ys = numeric(table, opts.y);
  const plotL = MARGIN.left;
  const plotR = width - MARGIN.right;
  const plotT = MARGIN.top;
  const plotB = height - MARGIN.bottom;
  const sx = makeScale(xs, plotL, plotR);
  const sy = makeScale(ys, plotB, plotT);

  // group order = first appearance, so the legend is stable
  const groups: string[] = [];
  for (const row of table.rows) {
    if (!groups.includes(row[group])) groups.push(row[group]);
  }

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${pos(width / 2)}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">${escapeXml(opts.title)}</text>`
    );
  }

  // axes, ticks, grid
  parts.push(
    `<line x1="${plotL}" y1="${plotB}" x2="${plotR}" y2="${plotB}" stroke="#333"/>`,
    `<line x1="${plotL}" y1="${plotT}" x2="${plotL}" y2="${plotB}" stroke="#333"/>`
  );
  for (let t = 0; t <= TICKS; t++) {
    const fx = sx.lo + ((sx.hi - sx.lo) * t) / TICKS;
    const px = pos(plotL + ((plotR - plotL) * t) / TICKS);
    parts.push(
      `<line x1="${px}" y1="${plotB}" x2="${px}" y2="${plotB + 4}" stroke="#333"/>`,
      `<line x1="${px}" y1="${plotT}" x2="${px}" y2="${plotB}" stroke="#eee"/>`,
      `<text x="${px}" y="${plotB + 17}" text-anchor="middle" font-family="sans-serif" font-size="10">${fmt(fx)}</text>`
    );
    const fy = sy.lo + ((sy.hi - sy.lo) * t) / TICKS;
    const py = pos(plotB - ((plotB - plotT) * t) / TICKS);
    parts.push(
      `<line x1="${plotL - 4}" y1="${py}" x2="${plotL}" y2="${py}" stroke="#333"/>`,
      `<line x1="${plotL}" y1="${py}" x2="${plotR}" y2="${py}" stroke="#eee"/>`,
      `<text x="${plotL - 7}" y="${py}" text-anchor="end" dominant-baseline="middle" font-family="sans-serif" font-size="10">${fmt(fy)}</text>`
    );
  }
  parts.push(
    `<text x="${pos((plotL + plotR) / 2)}" y="${height - 10}" text-anchor="middle" font-family="sans-serif" font-size="12">${escapeXml(opts.x)}</text>`,
    `<text x="16" y="${pos((plotT + plotB) / 2)}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 ${pos((plotT + plotB) / 2)})">${escapeXml(opts.y)}</text>`
  );

  // one marker per row
  table.rows.forEach((row, i) => {
    const g = groups.indexOf(row[group]);
    parts.push(marker(g, sx.map(xs[i]), sy.map(ys[i]), PALETTE[g % PALETTE.length]));
  });

  // legend by group
  groups.forEach((name, g) => {
    const ly = plotT + 8 + g * 18;
    parts.push(marker(g, plotR - 90, ly, PALETTE[g % PALETTE.length]));
    parts.push(
      `<text x="${pos(plotR - 80)}" y="${pos(ly)}" dominant-baseline="middle" font-family="sans-serif" font-size="11">${escapeXml(name)}</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
