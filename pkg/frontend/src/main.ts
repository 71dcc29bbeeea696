/**
 * CLI: render an experiment CSV as an SVG scatter chart.
 *
 * Usage:
 *   node dist/main.js --csv results.csv --x meanBorda \
 *     --y studentsNoEnvyRatio --out figure.svg [--title "Market 1"]
 */

import { readFileSync, writeFileSync } from "fs";
import { buildScatter } from "./chart.js";
import { CsvError, parseCsv } from "./csv.js";

interface Args {
  csv: string;
  x: string;
  y: string;
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): Args {
  const args: { [k: string]: string } = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near '${flag}'`);
    }
    args[flag.slice(2)] = argv[i + 1];
  }
  if (!args.csv) throw new Error("--csv is required");
  return {
    csv: args.csv,
    x: args.x ?? "meanBorda",
    y: args.y ?? "studentsNoEnvyRatio",
    out: args.out ?? "plot.svg",
    title: args.title,
  };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const table = parseCsv(readFileSync(args.csv, "utf-8"));
    const svg = buildScatter(table, {
      x: args.x,
      y: args.y,
      title: args.title,
    });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out} (${table.rows.length} markers)`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`csv error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(main(process.argv.slice(2)));
}
