#!/usr/bin/env node
/**
 * plotkit <kind> --in <csv> [--overlay <csv>] --out <file> [--value <column>] [--dpi <n>]
 *
 * kind: heatmap | violin | wigner. Writes an SVG document to --out.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { SchemaError, parseCsv } from "./csv.js";
import { renderHeatmap } from "./heatmap.js";
import { renderViolin } from "./violin.js";
import { renderWigner } from "./wigner.js";

const USAGE =
  "usage: plotkit <heatmap|violin|wigner> --in <csv> [--overlay <csv>] --out <file> " +
  "[--value <column>] [--dpi <n>]";

interface Args {
  kind: string;
  input: string;
  overlay: string | null;
  out: string;
  value: string;
  dpi: number;
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new SchemaError(USAGE);
  }
  const [kind, ...rest] = argv;
  if (!["heatmap", "violin", "wigner"].includes(kind)) {
    throw new SchemaError(`unknown plot kind '${kind}'\n${USAGE}`);
  }
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const name = rest[i];
    const value = rest[i + 1];
    if (!name.startsWith("--") || value === undefined) {
      throw new SchemaError(`malformed arguments near '${name}'\n${USAGE}`);
    }
    flags.set(name.slice(2), value);
  }
  const input = flags.get("in");
  const out = flags.get("out");
  if (!input || !out) {
    throw new SchemaError(`--in and --out are required\n${USAGE}`);
  }
  const dpi = Number(flags.get("dpi") ?? "100");
  if (!Number.isFinite(dpi) || dpi <= 0) {
    throw new SchemaError(`--dpi must be a positive number, got '${flags.get("dpi")}'`);
  }
  return {
    kind,
    input,
    overlay: flags.get("overlay") ?? null,
    out,
    value: flags.get("value") ?? "fidelity",
    dpi,
  };
}

export function run(argv: string[]): void {
  const args = parseArgs(argv);
  const table = parseCsv(readFileSync(args.input, "utf8"));
  let svg: string;
  if (args.kind === "heatmap") {
    svg = renderHeatmap(table, args.value, args.dpi);
  } else if (args.kind === "violin") {
    const overlay = args.overlay ? parseCsv(readFileSync(args.overlay, "utf8")) : null;
    svg = renderViolin(table, overlay, args.dpi);
  } else {
    svg = renderWigner(table, args.dpi);
  }
  writeFileSync(args.out, svg);
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  try {
    run(process.argv.slice(2));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exit(err instanceof SchemaError ? 2 : 1);
  }
}
