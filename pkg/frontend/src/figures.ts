/** Registry of the six figure jobs: which CSV schema each consumes and how
 * its columns map onto axes and series.  Rendering never recomputes model
 * math; the only numeric transformation is axis scaling. */

import { parseCsv, requireColumns, toNumber, type Table } from "./csv.js";
import type { ScaleKind } from "./scale.js";

export type FigureId = "psd_cont" | "psd_disc" | "k0_vs_p" | "k0_vs_dt" | "kf_diff" | "kf_abs";

export interface FigureSpec {
  id: FigureId;
  columns: string[];
  x: string;
  y: string;
  series: string;
  xScale: ScaleKind;
  yScale: ScaleKind;
  xLabel: string;
  yLabel: string;
  title: string;
  seriesLabel: (value: string) => string;
}

const identity = (value: string) => value;

export const FIGURES: Record<FigureId, FigureSpec> = {
  psd_cont: {
    id: "psd_cont",
    columns: ["frequency_hz", "model", "psd"],
    x: "frequency_hz",
    y: "psd",
    series: "model",
    xScale: "log",
    yScale: "log",
    xLabel: "frequency [hz]",
    yLabel: "psd",
    title: "gmp psd family and tight bound",
    seriesLabel: identity,
  },
  psd_disc: {
    id: "psd_disc",
    columns: ["frequency_hz", "model", "psd"],
    x: "frequency_hz",
    y: "psd",
    series: "model",
    xScale: "log",
    yScale: "log",
    xLabel: "frequency [hz]",
    yLabel: "psd",
    title: "discrete gmp psd family and bounds",
    seriesLabel: identity,
  },
  k0_vs_p: {
    id: "k0_vs_p",
    columns: ["p", "tau_s", "k0_required"],
    x: "p",
    y: "k0_required",
    series: "tau_s",
    xScale: "linear",
    yScale: "linear",
    xLabel: "index separation p",
    yLabel: "required initial inflation k0",
    title: "initial inflation requirement vs index separation",
    seriesLabel: (value) => `tau=${value}`,
  },
  k0_vs_dt: {
    id: "k0_vs_dt",
    columns: ["dt_s", "interval", "k0_min"],
    x: "dt_s",
    y: "k0_min",
    series: "interval",
    xScale: "log",
    yScale: "linear",
    xLabel: "sampling interval [s]",
    yLabel: "minimum k0",
    title: "minimum initial inflation vs sampling interval",
    seriesLabel: identity,
  },
  kf_diff: {
    id: "kf_diff",
    columns: ["step", "time_s", "model", "predicted_sigma_pos", "true_sigma_pos", "diff"],
    x: "time_s",
    y: "diff",
    series: "model",
    xScale: "linear",
    yScale: "linear",
    xLabel: "time [s]",
    yLabel: "reported minus actual sigma",
    title: "position sigma margin per bound model",
    seriesLabel: identity,
  },
  kf_abs: {
    id: "kf_abs",
    columns: ["step", "time_s", "model", "predicted_sigma_pos", "true_sigma_pos", "diff"],
    x: "time_s",
    y: "predicted_sigma_pos",
    series: "model",
    xScale: "linear",
    yScale: "linear",
    xLabel: "time [s]",
    yLabel: "position sigma",
    title: "reported position sigma per model",
    seriesLabel: identity,
  },
};

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

/** Extract the figure's series from CSV text, in first-appearance order. */
export function extractSeries(spec: FigureSpec, text: string): Series[] {
  const table: Table = parseCsv(text);
  const columns = requireColumns(table, spec.columns);
  if (table.rows.length === 0) {
    throw new Error("no data rows");
  }
  const xAt = columns.get(spec.x)!;
  const yAt = columns.get(spec.y)!;
  const seriesAt = columns.get(spec.series)!;
  const byKey = new Map<string, Series>();
  const order: Series[] = [];
  for (const row of table.rows) {
    const key = row[seriesAt];
    let series = byKey.get(key);
    if (!series) {
      series = { label: spec.seriesLabel(key), x: [], y: [] };
      byKey.set(key, series);
      order.push(series);
    }
    series.x.push(toNumber(row[xAt], spec.x));
    series.y.push(toNumber(row[yAt], spec.y));
  }
  return order;
}
