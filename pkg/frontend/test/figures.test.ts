import * as path from "path";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";
import { readRunCsv } from "../src/csv";
import { buildBoxplot, buildConvergence, buildEstimator,
         buildTiming } from "../src/figures";
import { buildFigure } from "../src/render";
import { boxStats, quantile } from "../src/stats";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "fixtures");

describe("stats", () => {
  it("matches the hand quartiles of 1..5", () => {
    const stats = boxStats([5, 3, 1, 4, 2]);
    expect(stats.median).toBe(3);
    expect(stats.q1).toBe(2);
    expect(stats.q3).toBe(4);
    expect(stats.whiskerLow).toBe(1);
    expect(stats.whiskerHigh).toBe(5);
    expect(stats.outliers).toEqual([]);
  });

  it("uses linear interpolation between order statistics", () => {
    expect(quantile([0.2, 0.3, 0.4], 0.25)).toBeCloseTo(0.25, 12);
  });
});

describe("boxplot figure", () => {
  const fig = buildBoxplot(readRunCsv(path.join(FIXTURES, "accuracy.csv")));

  it("groups by (norm, solver) within each example facet", () => {
    const keys = fig.sidecarRows.map((r) => `${r[0]}/${r[1]}/${r[2]}`);
    expect(keys).toEqual([
      "integral/HGauss/TikhonovLC",
      "integral/HGbar/TikhonovLC",
      "nonlocal/HGbar/TikhonovLC",
    ]);
  });

  it("whiskers sit at min/max when nothing is an outlier", () => {
    const hgbar = fig.sidecarRows[1];
    expect(hgbar.slice(3)).toEqual([5, 0.03, 0.02, 0.04, 0.01, 0.05, ""]);
  });

  it("detects the planted outlier", () => {
    const hgauss = fig.sidecarRows[0];
    expect(hgauss[4]).toBe(0.12);       // median
    expect(hgauss[8]).toBe(0.13);       // whisker_high below the outlier
    expect(hgauss[9]).toBe("0.5");      // outlier list
  });

  it("warns about the empty nonlocal/HGauss group", () => {
    expect(fig.warnings.some((w) => w.includes("nonlocal/HGauss"))).toBe(true);
  });
});

describe("convergence figure", () => {
  it("has unit slope for errors halving with the noise", () => {
    const fig = buildConvergence(
      readRunCsv(path.join(FIXTURES, "convergence.csv")));
    const rows = fig.sidecarRows;     // example,norm,solver,nsr,median,count
    expect(rows).toHaveLength(4);
    const pts = rows.map((r) => [Math.log(Number(r[3])),
                                 Math.log(Number(r[4]))]);
    const slope = (pts[3][1] - pts[0][1]) / (pts[3][0] - pts[0][0]);
    expect(slope).toBeCloseTo(1.0, 10);
  });
});

describe("estimator figure", () => {
  it("emits coincident curves when the estimate is exact", () => {
    const fig = buildEstimator([
      { s: 0.5, phi_hat: 1.0, phi_true: 1.0 },
      { s: 1.0, phi_hat: 0.5, phi_true: 0.5 },
      { s: 0.25, phi_hat: 2.0, phi_true: 2.0 },
    ]);
    const gaps = fig.sidecarRows.map((r) => Math.abs(Number(r[1]) - Number(r[2])));
    expect(Math.max(...gaps)).toBe(0);
    // rows sorted by s for the step plot
    expect(fig.sidecarRows.map((r) => r[0])).toEqual([0.25, 0.5, 1.0]);
  });
});

describe("timing figure", () => {
  it("takes the median time per (solver, n0)", () => {
    const fig = buildTiming(readRunCsv(path.join(FIXTURES, "timing.csv")));
    const byKey = new Map(fig.sidecarRows.map(
      (r) => [`${r[1]}@${r[2]}`, Number(r[3])]));
    expect(byKey.get("TikhonovLC@6")).toBe(2.0);
    expect(byKey.get("TikhonovLC@12")).toBe(9.0);
    expect(byKey.get("IterativeLC@6")).toBeCloseTo(0.55, 12);
  });
});

describe("buildFigure dispatch", () => {
  it("rejects unknown kinds", () => {
    expect(() => buildFigure("pie" as never, "x.csv")).toThrow(/unknown/);
  });
});
