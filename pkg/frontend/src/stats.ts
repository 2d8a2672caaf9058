/**
 * Box-plot statistics matching the solver library's conventions:
 * quartiles by linear interpolation, whiskers at the last data point
 * inside 1.5*IQR, everything beyond listed as outliers.
 */

export interface BoxStats {
  median: number;
  q1: number;
  q3: number;
  whiskerLow: number;
  whiskerHigh: number;
  outliers: number[];
  count: number;
}

export function quantile(sorted: number[], q: number): number {
  if (sorted.length === 0) throw new Error("quantile of empty data");
  const pos = (sorted.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return sorted[lo];
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  return quantile(sorted, 0.5);
}

export function boxStats(values: number[]): BoxStats {
  const sorted = [...values].sort((a, b) => a - b);
  const q1 = quantile(sorted, 0.25);
  const q3 = quantile(sorted, 0.75);
  const iqr = q3 - q1;
  const loFence = q1 - 1.5 * iqr;
  const hiFence = q3 + 1.5 * iqr;
  const inside = sorted.filter((v) => v >= loFence && v <= hiFence);
  return {
    median: quantile(sorted, 0.5),
    q1,
    q3,
    whiskerLow: inside[0],
    whiskerHigh: inside[inside.length - 1],
    outliers: sorted.filter((v) => v < loFence || v > hiFence),
    count: sorted.length,
  };
}

/** Group rows by a key function, preserving first-seen key order. */
export function groupBy<T>(rows: readonly T[], key: (row: T) => string): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = groups.get(k);
    if (bucket) bucket.push(row);
    else groups.set(k, [row]);
  }
  return groups;
}
