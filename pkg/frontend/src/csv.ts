/**
 * Strict readers/writers for the kernelop CSV artifacts.
 *
 * Two schemas exist: experiment run tables
 * (example,norm,solver,nsr,n0,seed,rel_error,time_s,lambda_or_stop)
 * and single-solve estimator tables (s,phi_hat,phi_true). Values never
 * contain separators or quotes, so parsing is a plain split with header
 * validation.
 */

import * as fs from "fs";

export const RUN_HEADER = [
  "example", "norm", "solver", "nsr", "n0", "seed",
  "rel_error", "time_s", "lambda_or_stop",
] as const;

export interface RunRow {
  example: string;
  norm: string;
  solver: string;
  nsr: number;
  n0: number;
  seed: number;
  rel_error: number;
  time_s: number;
  lambda_or_stop: number;
}

export interface EstimatorRow {
  s: number;
  phi_hat: number;
  phi_true: number;
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

function requireColumns(header: string[], wanted: readonly string[], path: string): number[] {
  return wanted.map((name) => {
    const idx = header.indexOf(name);
    if (idx < 0) {
      throw new Error(`${path}: missing column '${name}' (found: ${header.join(",")})`);
    }
    return idx;
  });
}

function num(field: string, line: number, path: string): number {
  const value = Number(field);
  if (!Number.isFinite(value)) {
    throw new Error(`${path}:${line}: not a number: '${field}'`);
  }
  return value;
}

export function readRunCsv(path: string): RunRow[] {
  const lines = splitLines(fs.readFileSync(path, "utf8"));
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  const header = lines[0].split(",");
  const idx = requireColumns(header, RUN_HEADER, path);
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    const get = (k: number) => parts[idx[k]];
    return {
      example: get(0),
      norm: get(1),
      solver: get(2),
      nsr: num(get(3), i + 2, path),
      n0: num(get(4), i + 2, path),
      seed: num(get(5), i + 2, path),
      rel_error: num(get(6), i + 2, path),
      time_s: num(get(7), i + 2, path),
      lambda_or_stop: num(get(8), i + 2, path),
    };
  });
}

export function readEstimatorCsv(path: string): EstimatorRow[] {
  const lines = splitLines(fs.readFileSync(path, "utf8"));
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  const header = lines[0].split(",");
  const idx = requireColumns(header, ["s", "phi_hat", "phi_true"], path);
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    return {
      s: num(parts[idx[0]], i + 2, path),
      phi_hat: num(parts[idx[1]], i + 2, path),
      phi_true: num(parts[idx[2]], i + 2, path),
    };
  });
}

/** Serialize a data table; numbers are emitted with full precision. */
export function writeCsv(
  path: string,
  header: readonly string[],
  rows: readonly (readonly (string | number)[])[],
): void {
  const fmt = (v: string | number) =>
    typeof v === "number" ? formatNumber(v) : v;
  const body = rows.map((row) => row.map(fmt).join(","));
  fs.writeFileSync(path, [header.join(","), ...body].join("\n") + "\n");
}

/** Deterministic full-precision number formatting (round-trips doubles). */
export function formatNumber(v: number): string {
  if (Number.isInteger(v) && Math.abs(v) < 2 ** 53) return String(v);
  return String(v);
}
