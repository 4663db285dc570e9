/** Step-plot geometry: timelines are piecewise-constant, so charts draw
 * horizontal runs with vertical jumps (never smoothed curves). Pure
 * coordinate mapping over server-provided samples.
 */

import { TimelinePreviewDto } from "../types.js";

export interface StepPoint {
  x: number;
  y: number;
}

/** Polyline vertices of a step plot in data space: (t, v) -> run to t+dur. */
export function stepPoints(preview: TimelinePreviewDto): StepPoint[] {
  const points: StepPoint[] = [];
  for (const entry of preview.entries) {
    points.push({ x: entry.t_start_s, y: entry.value });
    points.push({ x: entry.t_start_s + entry.duration_s, y: entry.value });
  }
  return points;
}

/** SVG path string for data points scaled into a width x height viewport. */
export function toSvgPath(
  points: StepPoint[],
  width: number,
  height: number,
  pad = 4,
): string {
  if (points.length === 0) {
    return "";
  }
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const sx = (x: number) =>
    pad + ((x - x0) / Math.max(x1 - x0, 1e-12)) * (width - 2 * pad);
  const sy = (y: number) =>
    height - pad - ((y - y0) / Math.max(y1 - y0, 1e-12)) * (height - 2 * pad);
  return points
    .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.x).toFixed(1)} ${sy(p.y).toFixed(1)}`)
    .join(" ");
}

/** Line vertices for the supercap voltage overlay. */
export function voltagePoints(times_s: number[], voltages: number[]): StepPoint[] {
  return times_s.map((t, i) => ({ x: t, y: voltages[i] ?? 0 }));
}
