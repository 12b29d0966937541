/** Sweep explorer: line series for one axis, a heatmap grid for two, and a
 * progress readout while the job runs. Display strings are verbatim response
 * tokens; parsed numbers are used only to position points on screen. */

import type { ApiResult } from "./api";
import type { JobDoc, SweepResultDoc } from "./types";

export interface ProgressView {
  state: JobDoc["state"];
  completed: string;
  total: string;
  fraction: number;
}

export function progressView(job: JobDoc): ProgressView {
  const { completed, total } = job.progress;
  return {
    state: job.state,
    completed: String(completed),
    total: String(total),
    fraction: total > 0 ? completed / total : 0,
  };
}

export type SweepMetric = "total_value" | { action: string };

export interface SeriesPoint {
  x: string;
  y: string;
  xValue: number;
  yValue: number;
  converged: boolean;
}

function metricPath(metric: SweepMetric, rowIndex: number): (string | number)[] {
  return metric === "total_value"
    ? ["rows", rowIndex, "total_value"]
    : ["rows", rowIndex, "actions", metric.action];
}

function metricValue(result: SweepResultDoc, metric: SweepMetric, rowIndex: number): number {
  const row = result.rows[rowIndex]!;
  return metric === "total_value" ? row.total_value : (row.actions[metric.action] ?? NaN);
}

export function lineSeries(result: ApiResult<SweepResultDoc>, axis: string, metric: SweepMetric): SeriesPoint[] {
  const { data, raw } = result;
  return data.rows.map((row, i) => {
    const x = row.params[axis];
    return {
      x: raw.token(["rows", i, "params", axis]) ?? String(x),
      y: raw.token(metricPath(metric, i)) ?? String(metricValue(data, metric, i)),
      xValue: typeof x === "number" ? x : NaN,
      yValue: metricValue(data, metric, i),
      converged: row.converged,
    };
  });
}

export interface HeatmapView {
  xs: string[];
  ys: string[];
  cells: (string | null)[][]; // [y][x], verbatim tokens
  values: number[][];
}

export function heatmapGrid(
  result: ApiResult<SweepResultDoc>,
  xAxis: string,
  yAxis: string,
  metric: SweepMetric,
): HeatmapView {
  const { data, raw } = result;
  const xTokens = new Map<number | string, string>();
  const yTokens = new Map<number | string, string>();
  data.rows.forEach((row, i) => {
    const x = row.params[xAxis];
    const y = row.params[yAxis];
    if (x !== undefined && !xTokens.has(x)) xTokens.set(x, raw.token(["rows", i, "params", xAxis]) ?? String(x));
    if (y !== undefined && !yTokens.has(y)) yTokens.set(y, raw.token(["rows", i, "params", yAxis]) ?? String(y));
  });
  const xKeys = [...xTokens.keys()];
  const yKeys = [...yTokens.keys()];
  const cells: (string | null)[][] = yKeys.map(() => xKeys.map(() => null));
  const values: number[][] = yKeys.map(() => xKeys.map(() => NaN));
  data.rows.forEach((row, i) => {
    const xi = xKeys.indexOf(row.params[xAxis] as number | string);
    const yi = yKeys.indexOf(row.params[yAxis] as number | string);
    if (xi < 0 || yi < 0) return;
    cells[yi]![xi] = raw.token(metricPath(metric, i)) ?? String(metricValue(data, metric, i));
    values[yi]![xi] = metricValue(data, metric, i);
  });
  return {
    xs: xKeys.map((k) => xTokens.get(k)!),
    ys: yKeys.map((k) => yTokens.get(k)!),
    cells,
    values,
  };
}
