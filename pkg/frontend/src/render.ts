#!/usr/bin/env node
/**
 * Batch figure renderer.
 *
 *   render --spec <figure_spec.json> [--out <image path>]
 *
 * Reads the curve/result outputs named by the spec and writes a
 * deterministic SVG (identical inputs give identical bytes).  The fitted
 * polynomial is drawn from the stored samples in result.json; nothing is
 * refit here.  Exit codes: 0 success, 2 invalid input, 1 unexpected error.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { InputError, loadFigureInputs } from "./schema.js";
import { figureSvg } from "./svg.js";

interface Args {
  spec: string;
  out?: string;
}

function parseArgs(argv: string[]): Args {
  let spec: string | undefined;
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec") {
      spec = argv[++i];
    } else if (argv[i] === "--out") {
      out = argv[++i];
    } else if (argv[i] === "--help" || argv[i] === "-h") {
      console.log("usage: render --spec <figure_spec.json> [--out <image path>]");
      process.exit(0);
    } else {
      throw new InputError(`unknown argument ${argv[i]}`);
    }
  }
  if (!spec) {
    throw new InputError("missing required --spec <figure_spec.json>");
  }
  return { spec, out };
}

export function renderFigure(specFile: string, outOverride?: string): string {
  const { spec, panels } = loadFigureInputs(specFile);
  const svg = figureSvg(spec, panels);
  const outPath =
    outOverride ?? path.resolve(path.dirname(specFile), spec.output);
  fs.mkdirSync(path.dirname(outPath), { recursive: true });
  fs.writeFileSync(outPath, svg);
  return outPath;
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const outPath = renderFigure(args.spec, args.out);
    console.log(outPath);
    return 0;
  } catch (err) {
    if (err instanceof InputError || err instanceof SyntaxError) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    console.error(`unexpected error: ${(err as Error).stack ?? err}`);
    return 1;
  }
}

if (process.argv[1] && path.basename(process.argv[1]).startsWith("render")) {
  process.exit(main(process.argv.slice(2)));
}
