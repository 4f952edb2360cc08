// Minimal canvas chart for EPA trajectories. Layout math is separated
// from drawing so it can be unit tested without a canvas.

import { EpaSample } from "./view.js";

export const EPA_MIN = -4;
export const EPA_MAX = 4;

export interface Polyline {
  axis: "e" | "p" | "a";
  color: string;
  points: Array<[number, number]>;
}

const AXIS_COLORS: Record<"e" | "p" | "a", string> = {
  e: "#2e7d32",
  p: "#1565c0",
  a: "#ef6c00",
};

export function valueToY(value: number, height: number): number {
  const clamped = Math.min(Math.max(value, EPA_MIN), EPA_MAX);
  return ((EPA_MAX - clamped) / (EPA_MAX - EPA_MIN)) * height;
}

export function seriesPolylines(
  series: EpaSample[],
  width: number,
  height: number,
): Polyline[] {
  const axes: Array<"e" | "p" | "a"> = ["e", "p", "a"];
  if (series.length === 0) {
    return axes.map((axis) => ({ axis, color: AXIS_COLORS[axis], points: [] }));
  }
  // Samples are spread evenly; a single sample sits at the left edge.
  const step = series.length > 1 ? width / (series.length - 1) : 0;
  return axes.map((axis) => ({
    axis,
    color: AXIS_COLORS[axis],
    points: series.map((sample, i) => [i * step, valueToY(sample[axis], height)]),
  }));
}

export function drawChart(
  canvas: HTMLCanvasElement,
  impression: EpaSample[],
  emotion: EpaSample[],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);

  // Zero line.
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(0, valueToY(0, height));
  ctx.lineTo(width, valueToY(0, height));
  ctx.stroke();

  // Impression dashed, emotion solid, same axis colors.
  for (const [series, dash] of [
    [impression, [4, 3]],
    [emotion, []],
  ] as Array<[EpaSample[], number[]]>) {
    for (const line of seriesPolylines(series, width, height)) {
      if (line.points.length === 0) continue;
      ctx.strokeStyle = line.color;
      ctx.setLineDash(dash);
      ctx.beginPath();
      ctx.moveTo(line.points[0][0], line.points[0][1]);
      for (const [x, y] of line.points.slice(1)) {
        ctx.lineTo(x, y);
      }
      ctx.stroke();
    }
  }
  ctx.setLineDash([]);
}
