/**
 * Force-curve utilities: parsing the interchange CSV (for replay) and
 * projecting the rolling buffer into plot-space polylines.
 */

import type { CurvePoint } from "./view.js";

export interface CurveRow {
  branch: "approach" | "retract";
  handlePos: number;
  handleForce: number;
  tipGap: number;
  time: number;
}

export interface CurveEvent {
  kind: "snap_in" | "snap_off";
  handlePos: number;
  gapBefore: number;
  gapAfter: number;
}

export interface ParsedCurve {
  rows: CurveRow[];
  events: CurveEvent[];
}

export const CURVE_CSV_HEADER = "branch,handle_pos_m,handle_force_N,tip_gap_m,time_s";

export function parseCurveCsv(text: string): ParsedCurve {
  const lines = text.split("\n");
  if (lines[0].trim() !== CURVE_CSV_HEADER) {
    throw new Error(`unexpected curve CSV header: ${lines[0]}`);
  }
  const rows: CurveRow[] = [];
  const events: CurveEvent[] = [];
  for (const raw of lines.slice(1)) {
    const line = raw.trim();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      const parts = line.replace(/^#\s*/, "").split(",");
      if (parts[0] === "event") {
        events.push({
          kind: parts[1] === "snap_off" ? "snap_off" : "snap_in",
          handlePos: Number(parts[2]),
          gapBefore: Number(parts[3]),
          gapAfter: Number(parts[4]),
        });
      }
      continue;
    }
    const parts = line.split(",");
    rows.push({
      branch: parts[0] === "retract" ? "retract" : "approach",
      handlePos: Number(parts[1]),
      handleForce: Number(parts[2]),
      tipGap: Number(parts[3]),
      time: Number(parts[4]),
    });
  }
  return { rows, events };
}

export interface PlotPoint {
  x: number;
  y: number;
}

/** Map the buffer onto a w-by-h plot area (force up, handle right). */
export function curvePolyline(
  points: readonly CurvePoint[],
  width: number,
  height: number,
): PlotPoint[] {
  if (points.length < 2) return [];
  let zMin = Infinity;
  let zMax = -Infinity;
  let fMin = Infinity;
  let fMax = -Infinity;
  for (const p of points) {
    zMin = Math.min(zMin, p.handlePos);
    zMax = Math.max(zMax, p.handlePos);
    fMin = Math.min(fMin, p.handleForce);
    fMax = Math.max(fMax, p.handleForce);
  }
  const zSpan = zMax - zMin || 1;
  const fSpan = fMax - fMin || 1;
  return points.map((p) => ({
    x: ((p.handlePos - zMin) / zSpan) * width,
    y: height - ((p.handleForce - fMin) / fSpan) * height,
  }));
}
