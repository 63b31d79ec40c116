/**
 * Replay a recorded sweep CSV as a synthetic snapshot stream, one sample
 * per frame. Used by the demo mode and by the tests that drive the full
 * render + sonification path from real recorded physics.
 */

import type { ParsedCurve } from "./curve.js";
import type { WireEvent, WireSnapshot } from "./protocol.js";

export class CurveReplayer {
  private index = 0;
  private readonly eventRows: Map<number, WireEvent>;

  constructor(private readonly curve: ParsedCurve) {
    // Attach each recorded event to the first row at or past its handle
    // position on the matching branch (approach descends, retract rises).
    this.eventRows = new Map();
    for (const ev of curve.events) {
      const branch = ev.kind === "snap_in" ? "approach" : "retract";
      for (let i = 1; i < curve.rows.length; i++) {
        const row = curve.rows[i];
        if (row.branch !== branch) continue;
        const crossed =
          branch === "approach" ? row.handlePos <= ev.handlePos : row.handlePos >= ev.handlePos;
        if (crossed) {
          this.eventRows.set(i, {
            kind: ev.kind,
            handle_pos: ev.handlePos,
            tip_gap_before: ev.gapBefore,
            tip_gap_after: ev.gapAfter,
          });
          break;
        }
      }
    }
  }

  get length(): number {
    return this.curve.rows.length;
  }

  /** Next frame's snapshot, or null when the recording is exhausted. */
  next(): WireSnapshot | null {
    if (this.index >= this.curve.rows.length) return null;
    const i = this.index;
    const row = this.curve.rows[i];
    this.index += 1;
    const ev = this.eventRows.get(i);
    return {
      time: row.time,
      handlePos: row.handlePos,
      tipPos: row.tipGap,
      handleForce: row.handleForce,
      surfaceForce: row.handleForce,
      blend: 1.0,
      events: ev !== undefined ? [ev] : [],
    };
  }

  reset(): void {
    this.index = 0;
  }
}
