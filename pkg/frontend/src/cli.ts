/**
 * CLI: `plot --spec <file.json>` or inline flags mirroring the spec fields.
 *
 *   trace-plots plot --trace a.csv --label A --trace b.csv --label B \
 *     --panel primal_gap_vs_iter --panel fw_gap_vs_iter \
 *     [--fstar 395.66] --output figure
 *
 * Writes <output>.svg and <output>.png; warnings go to stderr.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { PANELS, type PanelKind, type PlotSpec } from "./plot.js";
import { outputBasename, render } from "./render.js";

function usage(): string {
  return [
    "usage: trace-plots plot --spec <file.json>",
    "       trace-plots plot --trace <csv> --label <name> [--trace ... --label ...]",
    "                        --panel <kind> [--panel ...] [--fstar <value>] --output <path>",
    `panel kinds: ${PANELS.join(", ")}`,
  ].join("\n");
}

function specFromFile(path: string): PlotSpec {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  return {
    trace_paths: raw.trace_paths ?? [],
    labels: raw.labels ?? [],
    panels: raw.panels ?? [],
    reference_fstar: raw.reference_fstar ?? null,
    output: raw.output ?? "figure",
  };
}

function specFromFlags(argv: string[]): PlotSpec {
  const spec: PlotSpec = {
    trace_paths: [],
    labels: [],
    panels: [],
    reference_fstar: null,
    output: "figure",
  };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`${flag} expects a value`);
      return argv[i];
    };
    switch (flag) {
      case "--trace":
        spec.trace_paths.push(next());
        break;
      case "--label":
        spec.labels.push(next());
        break;
      case "--panel":
        spec.panels.push(next() as PanelKind);
        break;
      case "--fstar":
        spec.reference_fstar = Number(next());
        break;
      case "--output":
        spec.output = next();
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return spec;
}

export function main(argv: string[]): number {
  try {
    if (argv.length === 0 || argv[0] !== "plot") {
      process.stderr.write(usage() + "\n");
      return argv[0] === "--help" ? 0 : 1;
    }
    const rest = argv.slice(1);
    const spec =
      rest[0] === "--spec" && rest.length >= 2 ? specFromFile(rest[1]) : specFromFlags(rest);
    const { svg, png, warnings } = render(spec);
    for (const warning of warnings) {
      process.stderr.write(`warning: ${warning}\n`);
    }
    const base = outputBasename(spec.output);
    writeFileSync(`${base}.svg`, svg);
    writeFileSync(`${base}.png`, png);
    process.stdout.write(`wrote ${base}.svg and ${base}.png\n`);
    return 0;
  } catch (error) {
    process.stderr.write(`error: ${error instanceof Error ? error.message : String(error)}\n`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
