/**
 * Deterministic SVG assembly: fixed canvas, fixed style constants, fixed
 * number formatting, so identical inputs produce identical bytes.
 */

import type { FigureSpecT, PanelData } from "./schema.js";

// Committed style: the pipeline outputs carry no visual information, so
// every color/size choice lives here.
export const STYLE = {
  width: 1180,
  height: 470,
  margin: { top: 56, right: 24, bottom: 58, left: 72 },
  gap: 48,
  pointColor: "#d95f02",
  pointRadius: 4,
  curveColor: "#1f77b4",
  curveWidth: 1.8,
  referenceColor: "#444444",
  axisColor: "#222222",
  gridColor: "#dddddd",
  font: "12px sans-serif",
  titleFont: "15px sans-serif",
} as const;

const EXTRAP_COLOR = "#d62728";

export function fmt(x: number): string {
  if (x === 0) return "0";
  const out = x.toPrecision(8);
  // Trim trailing zeros deterministically for compactness.
  return out.includes("e")
    ? out
    : out.replace(/(\.\d*?)0+$/, "$1").replace(/\.$/, "");
}

function tickValues(lo: number, hi: number, count: number): number[] {
  const ticks: number[] = [];
  for (let i = 0; i <= count; i++) {
    ticks.push(lo + ((hi - lo) * i) / count);
  }
  return ticks;
}

interface Scale {
  (x: number): number;
  lo: number;
  hi: number;
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const scale = ((x: number) => outLo + ((x - lo) / span) * (outHi - outLo)) as Scale;
  scale.lo = lo;
  scale.hi = hi;
  return scale;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function panelSvg(
  data: PanelData,
  spec: FigureSpecT,
  x0: number,
  panelWidth: number
): string {
  const { margin, height } = STYLE;
  const plotLeft = x0 + margin.left;
  const plotRight = x0 + panelWidth - margin.right;
  const plotTop = margin.top;
  const plotBottom = height - margin.bottom;

  const taus = data.points.map((p) => p.tau);
  const ys = [
    ...data.points.map((p) => p.noisy_mean),
    ...data.result.curve_samples.map(([, v]) => v),
    data.result.value_at_zero,
  ];
  if (data.result.reference !== undefined) {
    ys.push(data.result.reference);
  }
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);
  const pad = (yHi - yLo || Math.abs(yHi) || 1) * 0.1;
  const sx = linearScale(0, Math.max(...taus) * 1.04, plotLeft, plotRight);
  const sy = linearScale(yLo - pad, yHi + pad, plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<text x="${fmt((plotLeft + plotRight) / 2)}" y="${fmt(plotTop - 16)}" ` +
      `text-anchor="middle" style="font:${STYLE.titleFont}">${esc(data.label)}</text>`
  );
  // Axes, grid, ticks.
  for (const t of tickValues(sx.lo, sx.hi, 5)) {
    const px = fmt(sx(t));
    parts.push(
      `<line x1="${px}" y1="${fmt(plotTop)}" x2="${px}" y2="${fmt(plotBottom)}" ` +
        `stroke="${STYLE.gridColor}" stroke-width="1"/>`,
      `<text x="${px}" y="${fmt(plotBottom + 18)}" text-anchor="middle" ` +
        `style="font:${STYLE.font}">${esc(t.toPrecision(3))}</text>`
    );
  }
  for (const t of tickValues(sy.lo, sy.hi, 5)) {
    const py = fmt(sy(t));
    parts.push(
      `<line x1="${fmt(plotLeft)}" y1="${py}" x2="${fmt(plotRight)}" y2="${py}" ` +
        `stroke="${STYLE.gridColor}" stroke-width="1"/>`,
      `<text x="${fmt(plotLeft - 8)}" y="${py}" text-anchor="end" ` +
        `dominant-baseline="middle" style="font:${STYLE.font}">${esc(t.toPrecision(3))}</text>`
    );
  }
  parts.push(
    `<rect x="${fmt(plotLeft)}" y="${fmt(plotTop)}" width="${fmt(plotRight - plotLeft)}" ` +
      `height="${fmt(plotBottom - plotTop)}" fill="none" stroke="${STYLE.axisColor}"/>`
  );
  // Reference line (exact observable value).
  if (data.result.reference !== undefined) {
    const py = fmt(sy(data.result.reference));
    parts.push(
      `<line x1="${fmt(plotLeft)}" y1="${py}" x2="${fmt(plotRight)}" y2="${py}" ` +
        `stroke="${STYLE.referenceColor}" stroke-width="1.2" stroke-dasharray="6 4"/>`
    );
  }
  // Stored fitted polynomial (never refit here).
  const path = data.result.curve_samples
    .map(([t, v], i) => `${i === 0 ? "M" : "L"}${fmt(sx(t))},${fmt(sy(v))}`)
    .join(" ");
  parts.push(
    `<path d="${path}" fill="none" stroke="${STYLE.curveColor}" ` +
      `stroke-width="${STYLE.curveWidth}"/>`
  );
  // Noisy measurements.
  for (const p of data.points) {
    parts.push(
      `<circle cx="${fmt(sx(p.tau))}" cy="${fmt(sy(p.noisy_mean))}" ` +
        `r="${STYLE.pointRadius}" fill="${STYLE.pointColor}" fill-opacity="0.85"/>`
    );
  }
  // Extrapolated value at step size zero.
  const ex = fmt(sx(0));
  const ey = fmt(sy(data.result.value_at_zero));
  parts.push(
    `<g stroke="${EXTRAP_COLOR}" stroke-width="1.6">` +
      `<line x1="${fmt(sx(0) - 6)}" y1="${ey}" x2="${fmt(sx(0) + 6)}" y2="${ey}"/>` +
      `<line x1="${ex}" y1="${fmt(sy(data.result.value_at_zero) - 6)}" ` +
      `x2="${ex}" y2="${fmt(sy(data.result.value_at_zero) + 6)}"/></g>`
  );
  // Axis labels.
  parts.push(
    `<text x="${fmt((plotLeft + plotRight) / 2)}" y="${fmt(height - 14)}" ` +
      `text-anchor="middle" style="font:${STYLE.font}">${esc(spec.axis_labels.x)}</text>`,
    `<text x="${fmt(x0 + 18)}" y="${fmt((plotTop + plotBottom) / 2)}" text-anchor="middle" ` +
      `style="font:${STYLE.font}" transform="rotate(-90 ${fmt(x0 + 18)} ` +
      `${fmt((plotTop + plotBottom) / 2)})">${esc(spec.axis_labels.y)}</text>`
  );
  return parts.join("\n");
}

export function figureSvg(spec: FigureSpecT, panels: PanelData[]): string {
  const panelWidth = (STYLE.width - STYLE.gap * (panels.length - 1)) / panels.length;
  const body = panels
    .map((panel, i) => panelSvg(panel, spec, i * (panelWidth + STYLE.gap), panelWidth))
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${STYLE.width}" ` +
      `height="${STYLE.height}" viewBox="0 0 ${STYLE.width} ${STYLE.height}">`,
    `<rect width="${STYLE.width}" height="${STYLE.height}" fill="white"/>`,
    `<text x="${STYLE.width / 2}" y="24" text-anchor="middle" ` +
      `style="font:${STYLE.titleFont}">${esc(spec.title)}</text>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}
