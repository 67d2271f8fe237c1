/** CLI entry: render one figure job from a CSV file.
 *
 *   node dist/main.js --figure kf_diff --input kf_diff.csv --output out/kf_diff
 *
 * writes out/kf_diff.svg and out/kf_diff.png.  Schema mismatches and empty
 * inputs print a one-line diagnostic and exit nonzero.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { pathToFileURL } from "node:url";

import { FIGURES, type FigureId } from "./figures.js";
import { renderFigure, type RenderOptions } from "./render.js";
import type { ScaleKind } from "./scale.js";

interface CliArgs {
  figure: FigureId;
  input: string;
  output: string;
  options: RenderOptions;
}

function parseArgs(argv: string[]): CliArgs {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got ${flag}`);
    }
    values.set(flag.slice(2), argv[i + 1]);
  }
  const figure = values.get("figure");
  const input = values.get("input");
  const output = values.get("output");
  if (!figure || !input || !output) {
    throw new Error("required: --figure <id> --input <csv> --output <basename>");
  }
  if (!(figure in FIGURES)) {
    throw new Error(`unknown figure id: ${figure} (known: ${Object.keys(FIGURES).join(", ")})`);
  }
  const options: RenderOptions = {};
  const xScale = values.get("xscale");
  const yScale = values.get("yscale");
  if (xScale) options.xScale = checkScale(xScale);
  if (yScale) options.yScale = checkScale(yScale);
  return { figure: figure as FigureId, input, output, options };
}

function checkScale(value: string): ScaleKind {
  if (value !== "linear" && value !== "log") {
    throw new Error(`scale must be linear or log, got ${value}`);
  }
  return value;
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  try {
    const csvText = readFileSync(args.input, "utf8");
    const rendered = renderFigure(args.figure, csvText, args.options);
    mkdirSync(dirname(args.output) || ".", { recursive: true });
    writeFileSync(`${args.output}.svg`, rendered.svg);
    writeFileSync(`${args.output}.png`, rendered.png);
    console.log(`wrote: ${args.output}.svg`);
    console.log(`wrote: ${args.output}.png`);
    return 0;
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
