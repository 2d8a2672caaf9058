#!/usr/bin/env node
/**
 * kernelop-plot --kind <boxplot|estimator|convergence|timing>
 *               --in <csv> --out <svg> [--width W] [--height H]
 *
 * Renders one figure from a kernelop CSV artifact and writes the figure's
 * data table next to it as <out>.data.csv.
 */

import { KINDS, Kind, renderToFiles } from "./render";

interface Args {
  kind: Kind;
  in: string;
  out: string;
  width: number;
  height: number;
}

function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near '${flag}'`);
    }
    values[flag.slice(2)] = argv[i + 1];
  }
  for (const required of ["kind", "in", "out"]) {
    if (!(required in values)) throw new Error(`missing --${required}`);
  }
  if (!KINDS.includes(values.kind as Kind)) {
    throw new Error(`--kind must be one of ${KINDS.join(", ")}`);
  }
  return {
    kind: values.kind as Kind,
    in: values.in,
    out: values.out,
    width: values.width ? Number(values.width) : 900,
    height: values.height ? Number(values.height) : 520,
  };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    console.error("usage: kernelop-plot --kind <k> --in <csv> --out <svg>");
    return 2;
  }
  try {
    const result = renderToFiles(args.kind, args.in, args.out,
                                 args.width, args.height);
    for (const warning of result.warnings) console.warn(warning);
    console.log(`wrote ${result.svgPath} and ${result.sidecar}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exitCode = main(process.argv.slice(2));
}
