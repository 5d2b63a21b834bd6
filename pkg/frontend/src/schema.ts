/**
 * Input contracts for the figure renderer.
 *
 * The renderer consumes only the documented pipeline outputs: a figure
 * spec JSON naming per-panel inputs, each panel being a curve.csv plus a
 * result.json.  Extrapolation is never recomputed here; the fitted curve
 * is drawn from the stored curve_samples.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { z } from "zod";

export class InputError extends Error {}

export const PanelSpec = z.object({
  label: z.string(),
  curve_csv: z.string(),
  result_json: z.string(),
});

export const FigureSpec = z.object({
  title: z.string(),
  panels: z.array(PanelSpec).min(1).max(2),
  axis_labels: z.object({ x: z.string(), y: z.string() }).default({
    x: "step size tau",
    y: "observable",
  }),
  output: z.string(),
});
export type FigureSpecT = z.infer<typeof FigureSpec>;

export const ExtrapolationResult = z.object({
  value_at_zero: z.number(),
  gammas: z.array(z.number()),
  gamma_l1: z.number(),
  method: z.string(),
  residual: z.number().nullable().optional(),
  curve_samples: z.array(z.tuple([z.number(), z.number()])),
  reference: z.number().optional(),
  extrapolation_error: z.number().optional(),
});
export type ExtrapolationResultT = z.infer<typeof ExtrapolationResult>;

export interface CurvePoint {
  tau: number;
  noisy_mean: number;
  noiseless?: number;
}

const REQUIRED_COLUMNS = ["tau", "noisy_mean"] as const;

/** Parse a curve.csv, failing with the file and column named. */
export function readCurveCsv(file: string): CurvePoint[] {
  const text = fs.readFileSync(file, "utf8").trim();
  if (text === "") {
    throw new InputError(`${file}: empty curve file`);
  }
  const lines = text.split(/\r?\n/);
  const header = lines[0].split(",").map((h) => h.trim());
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new InputError(`${file}: missing column '${column}'`);
    }
  }
  if (lines.length < 2) {
    throw new InputError(`${file}: no data rows`);
  }
  const index = (name: string) => header.indexOf(name);
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    const num = (column: string): number => {
      const raw = cells[index(column)];
      const value = Number(raw);
      if (!Number.isFinite(value)) {
        throw new InputError(
          `${file}: row ${i + 1}: column '${column}' is not a number (${raw})`
        );
      }
      return value;
    };
    const point: CurvePoint = { tau: num("tau"), noisy_mean: num("noisy_mean") };
    if (header.includes("noiseless")) {
      point.noiseless = num("noiseless");
    }
    return point;
  });
}

export function readJsonFile<S extends z.ZodTypeAny>(
  file: string,
  schema: S
): z.output<S> {
  let raw: string;
  try {
    raw = fs.readFileSync(file, "utf8");
  } catch (err) {
    throw new InputError(`${file}: ${(err as Error).message}`);
  }
  const parsed = schema.safeParse(JSON.parse(raw));
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new InputError(
      `${file}: invalid ${issue.path.join(".") || "document"}: ${issue.message}`
    );
  }
  return parsed.data;
}

export interface PanelData {
  label: string;
  points: CurvePoint[];
  result: ExtrapolationResultT;
}

/** Resolve and load every panel input referenced by a spec file. */
export function loadFigureInputs(specFile: string): {
  spec: FigureSpecT;
  panels: PanelData[];
} {
  const spec = readJsonFile(specFile, FigureSpec);
  const base = path.dirname(specFile);
  const panels = spec.panels.map((panel) => ({
    label: panel.label,
    points: readCurveCsv(path.resolve(base, panel.curve_csv)),
    result: readJsonFile(path.resolve(base, panel.result_json), ExtrapolationResult),
  }));
  return { spec, panels };
}
