import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { readRunCsv, SchemaError, ColumnName } from "./csv.js";
import { renderFigure, Series } from "./plot.js";

const X_COLUMNS: Record<string, { column: ColumnName; label: string }> = {
  iters: { column: "k", label: "iterations" },
  bits: { column: "bits_cumulative", label: "transmitted bits" },
};

const Y_COLUMNS: Record<string, { column: ColumnName; label: string }> = {
  residual: { column: "avg_residual", label: "avg residual" },
  gradsq: { column: "avg_grad_sq", label: "avg squared grad norm" },
};

export interface PlotArgs {
  x: string;
  y: string;
  csv: { path: string; label: string }[];
  out: string;
  logy: boolean;
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): PlotArgs {
  if (argv[0] !== "plot") {
    throw new UsageError("usage: plot --x {iters|bits} --y {residual|gradsq} --csv PATH:LABEL [--csv ...] --out FILE.png [--logy]");
  }
  const args: PlotArgs = { x: "iters", y: "residual", csv: [], out: "", logy: false };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    switch (flag) {
      case "--x":
        args.x = argv[++i] ?? "";
        break;
      case "--y":
        args.y = argv[++i] ?? "";
        break;
      case "--csv": {
        const raw = argv[++i];
        if (!raw) throw new UsageError("--csv needs PATH:LABEL");
        const split = raw.lastIndexOf(":");
        if (split > 0 && split < raw.length - 1) {
          args.csv.push({ path: raw.slice(0, split), label: raw.slice(split + 1) });
        } else {
          args.csv.push({ path: raw, label: basename(raw).replace(/\.csv$/, "") });
        }
        break;
      }
      case "--out":
        args.out = argv[++i] ?? "";
        break;
      case "--logy":
        args.logy = true;
        break;
      default:
        throw new UsageError(`unknown flag '${flag}'`);
    }
  }
  if (!(args.x in X_COLUMNS)) throw new UsageError(`--x must be iters or bits, got '${args.x}'`);
  if (!(args.y in Y_COLUMNS)) throw new UsageError(`--y must be residual or gradsq, got '${args.y}'`);
  if (args.csv.length === 0) throw new UsageError("at least one --csv PATH:LABEL is required");
  if (!args.out) throw new UsageError("--out FILE.png is required");
  return args;
}

export function runPlot(args: PlotArgs): void {
  const xSpec = X_COLUMNS[args.x];
  const ySpec = Y_COLUMNS[args.y];
  const series: Series[] = args.csv.map(({ path, label }) => {
    const table = readRunCsv(path);
    return {
      label,
      x: table.columns.get(xSpec.column)!,
      y: table.columns.get(ySpec.column)!,
    };
  });
  const png = renderFigure({
    series,
    xLabel: xSpec.label,
    yLabel: ySpec.label,
    logY: args.logy,
  });
  writeFileSync(args.out, png);
  console.log(`wrote ${args.out} (${series.length} series)`);
}

export function main(argv: string[]): number {
  try {
    runPlot(parseArgs(argv));
    return 0;
  } catch (error) {
    if (error instanceof UsageError || error instanceof SchemaError) {
      console.error(`error: ${error.message}`);
      return 2;
    }
    throw error;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(basename(process.argv[1]));
if (invokedDirectly) {
  process.exitCode = main(process.argv.slice(2));
}
