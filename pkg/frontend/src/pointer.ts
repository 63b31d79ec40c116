/**
 * Pointer-as-lever: the vertical pixel position maps affinely onto the
 * handle height, clamped to the scene range. Pointer events arrive much
 * faster than the service wants commands, so a coalescer keeps only the
 * newest position and emits at most one set_handle per animation frame,
 * with strictly increasing sequence numbers.
 */

import { encodeSetHandle } from "./protocol.js";

export interface Calibration {
  /** handle height at the top edge of the scene strip (m) */
  topZ: number;
  /** handle height at the bottom edge (m) */
  bottomZ: number;
  /** scene strip height in CSS pixels */
  heightPx: number;
}

export function pointerToHandle(pointerY: number, calib: Calibration): number {
  const frac = pointerY / calib.heightPx;
  const z = calib.topZ + frac * (calib.bottomZ - calib.topZ);
  const lo = Math.min(calib.topZ, calib.bottomZ);
  const hi = Math.max(calib.topZ, calib.bottomZ);
  return Math.min(hi, Math.max(lo, z));
}

export class PointerCoalescer {
  private seq = 0;
  private pending: number | null = null;
  private lastSent: number | null = null;
  sent = 0;

  /** Buffer a pointer sample (any rate). */
  onPointer(pointerY: number, calib: Calibration): void {
    this.pending = pointerToHandle(pointerY, calib);
  }

  /**
   * Emit at most one command per call (call this once per animation
   * frame). Returns the encoded frame or null when there is nothing new.
   */
  flush(): string | null {
    if (this.pending === null || this.pending === this.lastSent) {
      return null;
    }
    this.lastSent = this.pending;
    this.pending = null;
    this.seq += 1;
    this.sent += 1;
    return encodeSetHandle(this.seq, this.lastSent);
  }

  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }
}
