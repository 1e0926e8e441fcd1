/**
 * Figure assembly: trace CSVs -> panels of gap/size curves.
 *
 * Gap panels are log-scaled; values at or below the floor of 1e-16 are
 * clipped (with a warning) before taking logs.  When no reference optimum is
 * supplied, primal-gap panels subtract the best observed primal minus a
 * 1e-12 margin and the axis is labeled as estimated.
 */

import { GLYPH_HEIGHT, textWidth } from "./font.js";
import type { Primitive, Scene } from "./scene.js";
import { readTrace, type TraceRecord } from "./traces.js";

export const PANELS = [
  "primal_gap_vs_iter",
  "primal_gap_vs_time",
  "fw_gap_vs_iter",
  "fw_gap_vs_time",
  "active_set_size",
] as const;

export type PanelKind = (typeof PANELS)[number];

export interface PlotSpec {
  trace_paths: string[];
  labels: string[];
  panels: PanelKind[];
  reference_fstar?: number | null;
  output: string;
}

export const GAP_FLOOR = 1e-16;

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const PANEL_W = 380;
const PANEL_H = 290;
const MARGIN_LEFT = 64;
const MARGIN_RIGHT = 14;
const MARGIN_TOP = 26;
const MARGIN_BOTTOM = 40;
const FIGURE_PAD = 12;
const LEGEND_H = 24;

export function validateSpec(spec: PlotSpec): void {
  if (spec.trace_paths.length === 0) {
    throw new Error("at least one trace is required");
  }
  if (spec.labels.length !== spec.trace_paths.length) {
    throw new Error(
      `labels (${spec.labels.length}) and trace paths (${spec.trace_paths.length}) must match`,
    );
  }
  if (spec.panels.length === 0) {
    throw new Error("at least one panel is required");
  }
  for (const panel of spec.panels) {
    if (!PANELS.includes(panel)) {
      throw new Error(`unknown panel ${JSON.stringify(panel)}; valid: ${PANELS.join(", ")}`);
    }
  }
}

function panelTitle(panel: PanelKind, estimated: boolean): string {
  switch (panel) {
    case "primal_gap_vs_iter":
      return estimated ? "primal gap (estimated f*) vs iteration" : "primal gap vs iteration";
    case "primal_gap_vs_time":
      return estimated ? "primal gap (estimated f*) vs time [s]" : "primal gap vs time [s]";
    case "fw_gap_vs_iter":
      return "FW gap vs iteration";
    case "fw_gap_vs_time":
      return "FW gap vs time [s]";
    case "active_set_size":
      return "active set size vs iteration";
  }
}

function isLogPanel(panel: PanelKind): boolean {
  return panel !== "active_set_size";
}

function xValue(panel: PanelKind, r: TraceRecord): number {
  return panel === "primal_gap_vs_time" || panel === "fw_gap_vs_time" ? r.elapsed_s : r.iteration;
}

function yValue(panel: PanelKind, r: TraceRecord, fstar: number): number {
  switch (panel) {
    case "primal_gap_vs_iter":
    case "primal_gap_vs_time":
      return r.primal - fstar;
    case "fw_gap_vs_iter":
    case "fw_gap_vs_time":
      return r.fw_gap;
    case "active_set_size":
      return r.active_set_size;
  }
}

/** Deterministic short number formatting for tick labels. */
export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (Number.isInteger(value) && abs < 1e6) return String(value);
  if (abs >= 0.01 && abs < 1e6) {
    return String(Number(value.toPrecision(4)));
  }
  return value.toExponential(1).replace("e+", "e").replace(".0e", "e");
}

function niceLinearTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function decadeTicks(loExp: number, hiExp: number): number[] {
  const span = hiExp - loExp;
  const step = span <= 7 ? 1 : span <= 14 ? 2 : Math.ceil(span / 7);
  const ticks: number[] = [];
  for (let e = loExp; e <= hiExp; e += step) ticks.push(e);
  return ticks;
}

interface Series {
  label: string;
  color: string;
  xs: number[];
  ys: number[];
}

export interface RenderResult {
  scene: Scene;
  warnings: string[];
}

export function buildScene(spec: PlotSpec): RenderResult {
  validateSpec(spec);
  const warnings: string[] = [];
  const traces = spec.trace_paths.map((p) => readTrace(p));

  const needsFstar = spec.panels.some(
    (p) => p === "primal_gap_vs_iter" || p === "primal_gap_vs_time",
  );
  let fstar = spec.reference_fstar ?? null;
  let estimated = false;
  if (needsFstar && fstar === null) {
    const best = Math.min(...traces.map((t) => Math.min(...t.map((r) => r.primal))));
    fstar = best - 1e-12;
    estimated = true;
    warnings.push(
      `no reference optimum given; using best observed primal - 1e-12 = ${fstar} (estimated)`,
    );
  }

  const cols = Math.min(2, spec.panels.length);
  const rows = Math.ceil(spec.panels.length / cols);
  const width = FIGURE_PAD * 2 + cols * PANEL_W;
  const height = FIGURE_PAD * 2 + LEGEND_H + rows * PANEL_H;
  const primitives: Primitive[] = [
    { kind: "rect", x: 0, y: 0, w: width, h: height, fill: "#ffffff" },
  ];

  // Legend strip across the top.
  let legendX = FIGURE_PAD + 4;
  const legendY = FIGURE_PAD + 4;
  spec.labels.forEach((label, i) => {
    const color = PALETTE[i % PALETTE.length];
    primitives.push({ kind: "rect", x: legendX, y: legendY, w: 14, h: GLYPH_HEIGHT, fill: color });
    primitives.push({
      kind: "text",
      x: legendX + 18,
      y: legendY,
      text: label,
      color: "#000000",
      scale: 1,
    });
    legendX += 18 + textWidth(label) + 22;
  });

  spec.panels.forEach((panel, index) => {
    const col = index % cols;
    const row = Math.floor(index / cols);
    const originX = FIGURE_PAD + col * PANEL_W;
    const originY = FIGURE_PAD + LEGEND_H + row * PANEL_H;
    const frameX = originX + MARGIN_LEFT;
    const frameY = originY + MARGIN_TOP;
    const frameW = PANEL_W - MARGIN_LEFT - MARGIN_RIGHT;
    const frameH = PANEL_H - MARGIN_TOP - MARGIN_BOTTOM;

    const series: Series[] = traces.map((records, i) => {
      const xs = records.map((r) => xValue(panel, r));
      let ys = records.map((r) => yValue(panel, r, fstar ?? 0));
      if (isLogPanel(panel)) {
        if (ys.some((v) => v < GAP_FLOOR)) {
          warnings.push(
            `${spec.labels[i]}: ${panel} has values at or below ${GAP_FLOOR}; ` +
              `clipped to the floor before log scaling`,
          );
        }
        ys = ys.map((v) => Math.log10(Math.max(v, GAP_FLOOR)));
      }
      return { label: spec.labels[i], color: PALETTE[i % PALETTE.length], xs, ys };
    });

    const xLo = Math.min(...series.map((s) => Math.min(...s.xs)));
    const xHi = Math.max(...series.map((s) => Math.max(...s.xs)));
    let yLo = Math.min(...series.map((s) => Math.min(...s.ys)));
    let yHi = Math.max(...series.map((s) => Math.max(...s.ys)));
    if (isLogPanel(panel)) {
      yLo = Math.floor(yLo);
      yHi = Math.ceil(yHi);
      if (yHi === yLo) yHi = yLo + 1;
    } else if (yHi === yLo) {
      yHi = yLo + 1;
    }
    const xSpan = xHi > xLo ? xHi - xLo : 1;

    const px = (x: number) => frameX + ((x - xLo) / xSpan) * frameW;
    const py = (y: number) => frameY + frameH - ((y - yLo) / (yHi - yLo)) * frameH;

    // Title centered over the frame.
    const title = panelTitle(panel, estimated);
    primitives.push({
      kind: "text",
      x: frameX + Math.max(0, Math.floor((frameW - textWidth(title)) / 2)),
      y: originY + 8,
      text: title,
      color: "#000000",
      scale: 1,
    });

    // Y ticks and labels.
    const yTicks = isLogPanel(panel) ? decadeTicks(yLo, yHi) : niceLinearTicks(yLo, yHi);
    for (const tick of yTicks) {
      const y = Math.round(py(tick));
      primitives.push({ kind: "line", x1: frameX - 3, y1: y, x2: frameX, y2: y, color: "#000000" });
      primitives.push({
        kind: "line",
        x1: frameX,
        y1: y,
        x2: frameX + frameW,
        y2: y,
        color: "#e0e0e0",
      });
      const label = isLogPanel(panel) ? `1e${tick}` : formatTick(tick);
      primitives.push({
        kind: "text",
        x: frameX - 6 - textWidth(label),
        y: y - Math.floor(GLYPH_HEIGHT / 2),
        text: label,
        color: "#000000",
        scale: 1,
      });
    }

    // X ticks and labels.
    for (const tick of niceLinearTicks(xLo, xHi)) {
      const x = Math.round(px(tick));
      primitives.push({
        kind: "line",
        x1: x,
        y1: frameY + frameH,
        x2: x,
        y2: frameY + frameH + 3,
        color: "#000000",
      });
      const label = formatTick(tick);
      primitives.push({
        kind: "text",
        x: x - Math.floor(textWidth(label) / 2),
        y: frameY + frameH + 7,
        text: label,
        color: "#000000",
        scale: 1,
      });
    }

    for (const s of series) {
      const points: Array<[number, number]> = s.xs.map((x, i) => [px(x), py(s.ys[i])]);
      primitives.push({ kind: "polyline", points, color: s.color });
    }
    primitives.push({ kind: "frame", x: frameX, y: frameY, w: frameW, h: frameH, color: "#000000" });
  });

  return { scene: { width, height, primitives }, warnings };
}
