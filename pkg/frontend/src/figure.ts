/**
 * Figure rendering for harness sweep output.
 *
 * Three kinds:
 *  - single_task: left panel log-log convergence of the decomposition terms,
 *    right panel linear comparison of the MI-rate bound and the
 *    chain-tightened bound against the CMI.
 *  - meta: two panels, quantities versus M at the fixed N and versus N at
 *    the fixed M.
 *  - bounds: mean per-point sensitivity with its lower/upper envelopes.
 *
 * Output is a self-contained SVG string, built deterministically (no dates,
 * no randomness) so identical inputs yield byte-identical files. Series
 * with a nonzero stderr_nats column get a translucent +/- 1 SE band.
 */

import { EmptyDataError, SchemaError, SweepRow } from "./csv.js";

export type FigureKind = "single_task" | "meta" | "bounds";

export interface FigureSpec {
  kind: FigureKind;
  rows: SweepRow[];
  logX?: boolean;
  logY?: boolean;
}

interface Point {
  x: number;
  y: number;
  se: number;
}

interface Series {
  label: string;
  color: string;
  points: Point[];
  band: boolean;
}

interface Panel {
  title: string;
  xLabel: string;
  logX: boolean;
  logY: boolean;
  series: Series[];
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

const REQUIRED: Record<FigureKind, string[]> = {
  single_task: ["cmi", "mi_rate", "sens_test_sum", "sens_chain_sum", "bound_tightened"],
  meta: ["memr", "within_task_rate", "hyper_mi_rate", "task_sens_sum"],
  bounds: ["sens_mean", "sens_lower_mean", "sens_upper_mean"],
};

function requireQuantities(rows: SweepRow[], kind: FigureKind): void {
  const present = new Set(rows.map((r) => r.quantity));
  for (const name of REQUIRED[kind]) {
    if (!present.has(name)) {
      throw new SchemaError(`missing required quantity column "${name}" for kind "${kind}"`);
    }
  }
}

function seriesFrom(
  rows: SweepRow[],
  quantity: string,
  x: (r: SweepRow) => number,
  label: string,
  color: string,
): Series {
  const seen = new Map<number, Point>();
  for (const r of rows) {
    if (r.quantity !== quantity) continue;
    const key = x(r);
    if (!seen.has(key)) {
      seen.set(key, { x: key, y: r.mean, se: r.stderr });
    }
  }
  const points = [...seen.values()].sort((a, b) => a.x - b.x);
  const band = points.some((p) => p.se > 0);
  return { label, color, points, band };
}

function modeWithMostPartners(
  rows: SweepRow[],
  key: (r: SweepRow) => number | null,
  partner: (r: SweepRow) => number | null,
): number {
  const partners = new Map<number, Set<number>>();
  for (const r of rows) {
    const k = key(r);
    const p = partner(r);
    if (k === null || p === null) continue;
    if (!partners.has(k)) partners.set(k, new Set());
    partners.get(k)!.add(p);
  }
  let best: number | null = null;
  let bestCount = -1;
  for (const [k, set] of partners) {
    if (set.size > bestCount) {
      best = k;
      bestCount = set.size;
    }
  }
  if (best === null) {
    throw new EmptyDataError("no usable (N, M) cells in the input");
  }
  return best;
}

export function buildPanels(spec: FigureSpec): Panel[] {
  const { kind, rows } = spec;
  requireQuantities(rows, kind);
  if (kind === "single_task") {
    const x = (r: SweepRow) => r.n;
    const left: Series[] = [
      seriesFrom(rows, "cmi", x, "cmi", PALETTE[0]),
      seriesFrom(rows, "mi_rate", x, "mi / N", PALETTE[1]),
      seriesFrom(rows, "sens_test_sum", x, "test sensitivity", PALETTE[2]),
      seriesFrom(rows, "sens_chain_sum", x, "chain sensitivity", PALETTE[3]),
    ];
    const right: Series[] = [
      seriesFrom(rows, "cmi", x, "cmi", PALETTE[0]),
      seriesFrom(rows, "mi_rate", x, "mi-rate bound", PALETTE[1]),
      seriesFrom(rows, "bound_tightened", x, "chain-tightened bound", PALETTE[4]),
    ];
    return [
      {
        title: "decomposition terms (log-log)",
        xLabel: "N",
        logX: spec.logX ?? true,
        logY: spec.logY ?? true,
        series: left,
      },
      {
        title: "bound comparison",
        xLabel: "N",
        logX: spec.logX ?? false,
        logY: spec.logY ?? false,
        series: right,
      },
    ];
  }
  if (kind === "meta") {
    const fixedN = modeWithMostPartners(rows, (r) => r.n, (r) => r.m);
    const fixedM = modeWithMostPartners(rows, (r) => r.m, (r) => r.n);
    const quantities: Array<[string, string]> = [
      ["memr", "memr"],
      ["within_task_rate", "within-task mi / N"],
      ["hyper_mi_rate", "hyper mi / NM"],
      ["task_sens_sum", "task sensitivity"],
      ["data_sens_sum", "data sensitivity"],
    ];
    const present = new Set(rows.map((r) => r.quantity));
    const used = quantities.filter(([q]) => present.has(q));
    const mRows = rows.filter((r) => r.n === fixedN && r.m !== null);
    const nRows = rows.filter((r) => r.m === fixedM);
    const mkSeries = (subset: SweepRow[], x: (r: SweepRow) => number) =>
      used.map(([q, label], i) => seriesFrom(subset, q, x, label, PALETTE[i]));
    return [
      {
        title: `versus M (N = ${fixedN})`,
        xLabel: "M",
        logX: spec.logX ?? false,
        logY: spec.logY ?? true,
        series: mkSeries(mRows, (r) => r.m as number),
      },
      {
        title: `versus N (M = ${fixedM})`,
        xLabel: "N",
        logX: spec.logX ?? false,
        logY: spec.logY ?? true,
        series: mkSeries(nRows, (r) => r.n),
      },
    ];
  }
  // bounds
  const x = (r: SweepRow) => r.n;
  const series: Series[] = [
    seriesFrom(rows, "sens_upper_mean", x, "upper envelope", PALETTE[1]),
    seriesFrom(rows, "sens_mean", x, "sensitivity", PALETTE[0]),
    seriesFrom(rows, "sens_lower_mean", x, "lower envelope", PALETTE[2]),
  ];
  return [
    {
      title: "sensitivity envelopes",
      xLabel: "N",
      logX: spec.logX ?? false,
      logY: spec.logY ?? true,
      series,
    },
  ];
}

// ---------------------------------------------------------------------------
// scales and svg assembly

interface Scale {
  (value: number): number;
}

function makeScale(
  domain: [number, number],
  range: [number, number],
  log: boolean,
): Scale {
  let [d0, d1] = domain;
  if (log) {
    d0 = Math.log10(d0);
    d1 = Math.log10(d1);
  }
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  return (value: number) => {
    const v = log ? Math.log10(value) : value;
    return range[0] + ((v - d0) / span) * (range[1] - range[0]);
  };
}

function ticks(domain: [number, number], log: boolean, count = 5): number[] {
  const [lo, hi] = domain;
  if (log) {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
      const t = Math.pow(10, e);
      if (t >= lo * (1 - 1e-9)) out.push(t);
    }
    return out.length >= 2 ? out : [lo, hi];
  }
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.01 && abs < 10000) {
    return Number(value.toPrecision(4)).toString();
  }
  return value.toExponential(1);
}

function panelDomains(panel: Panel): { x: [number, number]; y: [number, number] } {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of panel.series) {
    for (const p of s.points) {
      xs.push(p.x);
      const lo = p.y - p.se;
      const hi = p.y + p.se;
      if (!panel.logY || p.y > 0) ys.push(p.y);
      if (!panel.logY || lo > 0) ys.push(lo);
      if (!panel.logY || hi > 0) ys.push(hi);
    }
  }
  if (xs.length === 0 || ys.length === 0) {
    throw new EmptyDataError("no plottable points for a panel");
  }
  let x: [number, number] = [Math.min(...xs), Math.max(...xs)];
  let y: [number, number] = [Math.min(...ys), Math.max(...ys)];
  if (x[0] === x[1]) x = [x[0] - 1, x[1] + 1];
  if (y[0] === y[1]) y = [y[0] === 0 ? -1 : y[0] * 0.5, y[1] === 0 ? 1 : y[1] * 1.5];
  if (panel.logY) {
    y = [y[0] * 0.8, y[1] * 1.25];
  } else {
    const pad = (y[1] - y[0]) * 0.08;
    y = [y[0] - pad, y[1] + pad];
  }
  if (panel.logX && x[0] <= 0) {
    throw new SchemaError("log x-axis requires positive x values");
  }
  return { x, y };
}

const PANEL_W = 420;
const PANEL_H = 340;
const MARGIN = { top: 42, right: 16, bottom: 46, left: 64 };

function renderPanel(panel: Panel, offsetX: number): string {
  const { x: xDomain, y: yDomain } = panelDomains(panel);
  const plotX: [number, number] = [offsetX + MARGIN.left, offsetX + PANEL_W - MARGIN.right];
  const plotY: [number, number] = [PANEL_H - MARGIN.bottom, MARGIN.top];
  const sx = makeScale(xDomain, plotX, panel.logX);
  const sy = makeScale(yDomain, plotY, panel.logY);
  const parts: string[] = [];

  parts.push(
    `<rect x="${plotX[0]}" y="${plotY[1]}" width="${plotX[1] - plotX[0]}" ` +
      `height="${plotY[0] - plotY[1]}" fill="none" stroke="#444" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${(plotX[0] + plotX[1]) / 2}" y="${MARGIN.top - 18}" text-anchor="middle" ` +
      `font-size="14" fill="#111">${panel.title}</text>`,
  );
  for (const t of ticks(xDomain, panel.logX)) {
    const px = sx(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${plotY[0]}" x2="${px.toFixed(2)}" y2="${plotY[0] + 4}" stroke="#444"/>`,
      `<text x="${px.toFixed(2)}" y="${plotY[0] + 18}" text-anchor="middle" font-size="10" fill="#333">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(yDomain, panel.logY)) {
    const py = sy(t);
    parts.push(
      `<line x1="${plotX[0] - 4}" y1="${py.toFixed(2)}" x2="${plotX[0]}" y2="${py.toFixed(2)}" stroke="#444"/>`,
      `<text x="${plotX[0] - 7}" y="${(py + 3).toFixed(2)}" text-anchor="end" font-size="10" fill="#333">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(plotX[0] + plotX[1]) / 2}" y="${PANEL_H - 10}" text-anchor="middle" ` +
      `font-size="12" fill="#111">${panel.xLabel}</text>`,
  );

  const clampY = (v: number) =>
    panel.logY ? Math.min(Math.max(v, yDomain[0]), yDomain[1]) : v;
  for (const s of panel.series) {
    if (s.band) {
      const upper = s.points.map(
        (p) => `${sx(p.x).toFixed(2)},${sy(clampY(p.y + p.se)).toFixed(2)}`,
      );
      const lower = [...s.points]
        .reverse()
        .map((p) => `${sx(p.x).toFixed(2)},${sy(clampY(p.y - p.se)).toFixed(2)}`);
      parts.push(
        `<polygon class="se-band" points="${upper.join(" ")} ${lower.join(" ")}" ` +
          `fill="${s.color}" opacity="0.15" stroke="none"/>`,
      );
    }
  }
  for (const s of panel.series) {
    const pts = s.points
      .map((p) => `${sx(p.x).toFixed(2)},${sy(clampY(p.y)).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline class="series" points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.8"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(clampY(p.y)).toFixed(2)}" r="2.3" fill="${s.color}"/>`,
      );
    }
  }
  let legendY = plotY[1] + 10;
  for (const s of panel.series) {
    const lx = plotX[1] - 160;
    parts.push(
      `<line x1="${lx}" y1="${legendY}" x2="${lx + 18}" y2="${legendY}" stroke="${s.color}" stroke-width="2"/>`,
      `<text x="${lx + 24}" y="${legendY + 3}" font-size="10" fill="#111">${s.label}</text>`,
    );
    legendY += 14;
  }
  return parts.join("\n");
}

export function renderSvg(spec: FigureSpec): string {
  if (spec.rows.length === 0) {
    throw new EmptyDataError("no rows to plot");
  }
  const panels = buildPanels(spec);
  const width = PANEL_W * panels.length;
  const body = panels.map((panel, i) => renderPanel(panel, i * PANEL_W)).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_H}" ` +
    `viewBox="0 0 ${width} ${PANEL_H}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${PANEL_H}" fill="white"/>\n` +
    `${body}\n</svg>\n`
  );
}
