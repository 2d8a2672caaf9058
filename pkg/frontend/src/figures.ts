/**
 * Figure builders: each takes parsed CSV rows and produces an echarts
 * option plus the figure's own data table (written as the CSV sidecar and
 * used for golden-file comparisons).
 *
 * Kinds:
 *  - boxplot:     relative errors per (norm, solver), one facet per example
 *  - estimator:   estimated and true kernel vs s
 *  - convergence: median error vs noise-to-signal ratio, log-log
 *  - timing:      median wall time vs sample count n0
 */

import type { EChartsOption } from "echarts";
import { EstimatorRow, RunRow } from "./csv";
import { boxStats, groupBy, median } from "./stats";

export interface Figure {
  option: EChartsOption;
  sidecarHeader: string[];
  sidecarRows: (string | number)[][];
  warnings: string[];
}

const BASE: Partial<EChartsOption> = {
  animation: false,
  backgroundColor: "#ffffff",
};

function sortedUnique(values: string[]): string[] {
  return [...new Set(values)].sort();
}

function groupLabel(norm: string, solver: string): string {
  return `${norm}/${solver}`;
}

export function buildBoxplot(rows: RunRow[]): Figure {
  if (rows.length === 0) throw new Error("boxplot: no data rows");
  const examples = sortedUnique(rows.map((r) => r.example));
  const labels = sortedUnique(rows.map((r) => groupLabel(r.norm, r.solver)));
  const warnings: string[] = [];
  const sidecarRows: (string | number)[][] = [];

  const grids: object[] = [];
  const xAxes: object[] = [];
  const yAxes: object[] = [];
  const series: object[] = [];
  const titles: object[] = [];
  const width = 100 / examples.length;

  examples.forEach((example, facet) => {
    grids.push({
      left: `${facet * width + 6}%`,
      width: `${width - 9}%`,
      bottom: 80,
    });
    titles.push({
      text: example,
      textAlign: "center",
      left: `${facet * width + width / 2}%`,
      top: 6,
    });
    xAxes.push({
      type: "category",
      gridIndex: facet,
      data: labels,
      axisLabel: { rotate: 60, fontSize: 9 },
    });
    yAxes.push({
      type: "log",
      gridIndex: facet,
      name: facet === 0 ? "relative error" : "",
    });
    const perExample = rows.filter((r) => r.example === example);
    const groups = groupBy(perExample, (r) => groupLabel(r.norm, r.solver));
    const boxData: (number[] | string[])[] = [];
    const outlierData: [number, number][] = [];
    labels.forEach((label, li) => {
      const bucket = groups.get(label);
      if (!bucket || bucket.length === 0) {
        warnings.push(`boxplot: empty group ${example}/${label}, skipped`);
        boxData.push(["-", "-", "-", "-", "-"]);  // echarts empty item
        return;
      }
      const stats = boxStats(bucket.map((r) => r.rel_error));
      boxData.push([stats.whiskerLow, stats.q1, stats.median, stats.q3,
                    stats.whiskerHigh]);
      stats.outliers.forEach((v) => outlierData.push([li, v]));
      const [norm, solver] = label.split("/");
      sidecarRows.push([example, norm, solver, stats.count, stats.median,
                        stats.q1, stats.q3, stats.whiskerLow,
                        stats.whiskerHigh, stats.outliers.join("|")]);
    });
    series.push({
      type: "boxplot",
      xAxisIndex: facet,
      yAxisIndex: facet,
      data: boxData,
      itemStyle: { color: "#d0e2f3", borderColor: "#31708f" },
    });
    series.push({
      type: "scatter",
      xAxisIndex: facet,
      yAxisIndex: facet,
      data: outlierData,
      symbolSize: 4,
      itemStyle: { color: "#31708f" },
    });
  });

  return {
    option: { ...BASE, title: titles, grid: grids, xAxis: xAxes,
              yAxis: yAxes, series } as EChartsOption,
    sidecarHeader: ["example", "norm", "solver", "count", "median", "q1",
                    "q3", "whisker_low", "whisker_high", "outliers"],
    sidecarRows,
    warnings,
  };
}

export function buildEstimator(rows: EstimatorRow[]): Figure {
  if (rows.length === 0) throw new Error("estimator: no data rows");
  const sorted = [...rows].sort((a, b) => a.s - b.s);
  return {
    option: {
      ...BASE,
      legend: { data: ["estimate", "truth"], top: 6 },
      xAxis: { type: "value", name: "s" },
      yAxis: { type: "value", name: "kernel value" },
      series: [
        { name: "estimate", type: "line", showSymbol: false, step: "end",
          data: sorted.map((r) => [r.s, r.phi_hat]),
          lineStyle: { width: 2 } },
        { name: "truth", type: "line", showSymbol: false,
          data: sorted.map((r) => [r.s, r.phi_true]),
          lineStyle: { width: 1.5, type: "dashed" } },
      ],
    } as EChartsOption,
    sidecarHeader: ["s", "phi_hat", "phi_true"],
    sidecarRows: sorted.map((r) => [r.s, r.phi_hat, r.phi_true]),
    warnings: [],
  };
}

function medianLines(
  rows: RunRow[],
  xKey: (r: RunRow) => number,
): { label: string; points: [number, number][]; counts: number[] }[] {
  const labels = sortedUnique(rows.map((r) => groupLabel(r.norm, r.solver)));
  return labels.map((label) => {
    const bucket = rows.filter((r) => groupLabel(r.norm, r.solver) === label);
    const byX = groupBy(bucket, (r) => String(xKey(r)));
    const xs = [...byX.keys()].map(Number).sort((a, b) => a - b);
    return {
      label,
      points: xs.map((x) =>
        [x, median(byX.get(String(x))!.map((r) => r.rel_error))] as [number, number]),
      counts: xs.map((x) => byX.get(String(x))!.length),
    };
  });
}

export function buildConvergence(rows: RunRow[]): Figure {
  if (rows.length === 0) throw new Error("convergence: no data rows");
  const examples = sortedUnique(rows.map((r) => r.example));
  const warnings: string[] = [];
  const sidecarRows: (string | number)[][] = [];
  const series: object[] = [];
  for (const example of examples) {
    const perExample = rows.filter((r) => r.example === example);
    for (const line of medianLines(perExample, (r) => r.nsr)) {
      if (line.points.length === 0) {
        warnings.push(`convergence: empty group ${example}/${line.label}`);
        continue;
      }
      series.push({
        name: `${example}:${line.label}`,
        type: "line",
        data: line.points,
        showSymbol: true,
        symbolSize: 5,
      });
      line.points.forEach(([nsr, med], i) => {
        const [norm, solver] = line.label.split("/");
        sidecarRows.push([example, norm, solver, nsr, med, line.counts[i]]);
      });
    }
  }
  return {
    option: {
      ...BASE,
      legend: { type: "scroll", top: 6 },
      xAxis: { type: "log", name: "noise-to-signal ratio" },
      yAxis: { type: "log", name: "median relative error" },
      series,
    } as EChartsOption,
    sidecarHeader: ["example", "norm", "solver", "nsr", "median_rel_error",
                    "count"],
    sidecarRows,
    warnings,
  };
}

export function buildTiming(rows: RunRow[]): Figure {
  if (rows.length === 0) throw new Error("timing: no data rows");
  const warnings: string[] = [];
  const sidecarRows: (string | number)[][] = [];
  const series: object[] = [];
  const labels = sortedUnique(rows.map((r) => groupLabel(r.norm, r.solver)));
  for (const label of labels) {
    const bucket = rows.filter((r) => groupLabel(r.norm, r.solver) === label);
    const byN0 = groupBy(bucket, (r) => String(r.n0));
    const n0s = [...byN0.keys()].map(Number).sort((a, b) => a - b);
    if (n0s.length === 0) {
      warnings.push(`timing: empty group ${label}`);
      continue;
    }
    const points = n0s.map((n0) =>
      [n0, median(byN0.get(String(n0))!.map((r) => r.time_s))] as [number, number]);
    series.push({ name: label, type: "line", data: points, showSymbol: true });
    points.forEach(([n0, med], i) => {
      const [norm, solver] = label.split("/");
      sidecarRows.push([norm, solver, n0, med,
                        byN0.get(String(n0))!.length]);
    });
  }
  return {
    option: {
      ...BASE,
      legend: { top: 6 },
      xAxis: { type: "value", name: "n0" },
      yAxis: { type: "log", name: "median seconds" },
      series,
    } as EChartsOption,
    sidecarHeader: ["norm", "solver", "n0", "median_time_s", "count"],
    sidecarRows,
    warnings,
  };
}
