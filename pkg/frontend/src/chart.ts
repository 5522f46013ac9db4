/**
 * Minimal SVG line chart: pure coordinate math here, DOM assembly in the
 * view. Points are plotted against their index (one per applied request),
 * which matches how the metric trajectories are usually read.
 */
import type { SeriesPoint } from "./model.js";

export interface ChartLayout {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_LAYOUT: ChartLayout = { width: 360, height: 160, pad: 24 };

export interface ScaledChart {
  path: string;
  xy: { x: number; y: number }[];
  min: number;
  max: number;
}

export function scaleSeries(points: readonly SeriesPoint[], layout: ChartLayout = DEFAULT_LAYOUT): ScaledChart {
  if (points.length === 0) return { path: "", xy: [], min: 0, max: 0 };
  const values = points.map((p) => p.value);
  const min = Math.min(...values);
  const max = Math.max(...values);
  const span = max - min || 1; // flat series renders mid-height
  const innerW = layout.width - 2 * layout.pad;
  const innerH = layout.height - 2 * layout.pad;
  const xy = points.map((p, i) => ({
    x: layout.pad + (points.length === 1 ? innerW / 2 : (i / (points.length - 1)) * innerW),
    y: layout.pad + innerH - ((p.value - min) / span) * innerH,
  }));
  const path = xy.map((p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" ");
  return { path, xy, min, max };
}

export function renderChartSvg(
  svg: SVGElement,
  points: readonly SeriesPoint[],
  layout: ChartLayout = DEFAULT_LAYOUT,
): void {
  const { path, xy, min, max } = scaleSeries(points, layout);
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  const dots = xy
    .map((p) => `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="2.5"></circle>`)
    .join("");
  const labels =
    points.length > 0
      ? `<text class="chart-min" x="2" y="${layout.height - 6}">${min.toFixed(4)}</text>` +
        `<text class="chart-max" x="2" y="12">${max.toFixed(4)}</text>`
      : "";
  svg.innerHTML = `<path d="${path}" fill="none" stroke-width="2"></path>${dots}${labels}`;
}
