#!/usr/bin/env node
/**
 * figures --kind single_task|meta|bounds --in <csv> --out <img> [--logx --logy]
 *
 * Reads harness CSV output (never modified) and writes an SVG figure.
 * Exits nonzero on any error: 2 for usage/schema problems, 3 for empty
 * data, 1 for unexpected failures.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { EmptyDataError, SchemaError, parseCsv } from "./csv.js";
import { FigureKind, renderSvg } from "./figure.js";

interface CliArgs {
  kind: FigureKind;
  input: string;
  output: string;
  logX?: boolean;
  logY?: boolean;
}

export function parseArgs(argv: string[]): CliArgs {
  let kind: string | undefined;
  let input: string | undefined;
  let output: string | undefined;
  let logX: boolean | undefined;
  let logY: boolean | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    switch (arg) {
      case "--kind":
        kind = argv[++i];
        break;
      case "--in":
        input = argv[++i];
        break;
      case "--out":
        output = argv[++i];
        break;
      case "--logx":
        logX = true;
        break;
      case "--logy":
        logY = true;
        break;
      default:
        throw new SchemaError(`unknown argument "${arg}"`);
    }
  }
  if (kind !== "single_task" && kind !== "meta" && kind !== "bounds") {
    throw new SchemaError(`--kind must be single_task, meta or bounds (got "${kind}")`);
  }
  if (!input || !output) {
    throw new SchemaError("--in and --out are required");
  }
  return { kind, input, output, logX, logY };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const text = readFileSync(args.input, "utf8");
    const rows = parseCsv(text);
    const svg = renderSvg({
      kind: args.kind,
      rows,
      logX: args.logX,
      logY: args.logY,
    });
    writeFileSync(args.output, svg);
    console.log(`wrote ${args.output} (${svg.length} bytes)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof EmptyDataError) {
      console.error(`empty data: ${err.message}`);
      return 3;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

import { fileURLToPath } from "node:url";
if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
