#!/usr/bin/env node
/**
 * CLI: render metrics CSVs to PNG figures.
 *
 *   render --kind band    --in run.csv            --out fig.png [--loglog|--linear]
 *   render --kind overlay --in a.csv,b.csv,c.csv  --out fig.png [--loglog|--linear]
 *
 * Log-log axes are the default (the convergence claims are power laws).
 * Exit codes: 0 success, 1 usage or schema error, 2 I/O failure.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { parseMetricsCsv, SchemaError } from "./csv";
import { renderBand, renderOverlay } from "./figure";
import { encodePng } from "./png";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        loglog: { type: "boolean", default: false },
        linear: { type: "boolean", default: false },
        title: { type: "string" },
      },
    }).values;
  } catch (err) {
    process.stderr.write(`usage error: ${(err as Error).message}\n`);
    return 1;
  }
  const kind = args.kind;
  if (kind !== "band" && kind !== "overlay") {
    process.stderr.write(`--kind must be band or overlay, got ${kind ?? "<missing>"}\n`);
    return 1;
  }
  if (!args.in || !args.out) {
    process.stderr.write("--in and --out are required\n");
    return 1;
  }
  const loglog = !args.linear; // default log-log; --linear switches, --loglog is explicit
  const paths = args.in.split(",").filter((p) => p.length > 0);
  if (kind === "band" && paths.length !== 1) {
    process.stderr.write(`band figures take exactly one CSV, got ${paths.length}\n`);
    return 1;
  }

  let files;
  try {
    files = paths.map((p) => parseMetricsCsv(readFileSync(p, "utf8"), p));
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`read error: ${(err as Error).message}\n`);
    return 2;
  }

  const raster =
    kind === "band"
      ? renderBand(files[0], { loglog, title: args.title })
      : renderOverlay(files, { loglog, title: args.title });
  try {
    writeFileSync(args.out, encodePng(raster));
  } catch (err) {
    process.stderr.write(`write error: ${(err as Error).message}\n`);
    return 2;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
