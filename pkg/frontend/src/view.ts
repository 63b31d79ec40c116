/**
 * ViewState: everything the renderer needs, nothing else.
 *
 * Snapshots arrive in order; anything with a non-increasing timestamp is
 * dropped so replays and reconnects can never run the scene backwards.
 * The force-curve buffer is a bounded ring of the most recent samples.
 */

import type { WireEvent, WireSnapshot } from "./protocol.js";

export const CURVE_BUFFER_CAPACITY = 2000;

export type InputMode = "pointer" | "scripted";

export interface CurvePoint {
  handlePos: number;
  handleForce: number;
}

export class ViewState {
  latest: WireSnapshot | null = null;
  connected = false;
  audioEnabled = false;
  inputMode: InputMode = "pointer";
  /** frames remaining on the snap-event flash indicator */
  flashFramesLeft = 0;
  lastEvent: WireEvent | null = null;
  dropped = 0;

  private curve: CurvePoint[] = [];

  ingest(snapshot: WireSnapshot): boolean {
    if (this.latest !== null && snapshot.time <= this.latest.time) {
      this.dropped += 1;
      return false;
    }
    this.latest = snapshot;
    this.curve.push({ handlePos: snapshot.handlePos, handleForce: snapshot.handleForce });
    if (this.curve.length > CURVE_BUFFER_CAPACITY) {
      this.curve.splice(0, this.curve.length - CURVE_BUFFER_CAPACITY);
    }
    if (snapshot.events.length > 0) {
      this.lastEvent = snapshot.events[snapshot.events.length - 1];
      this.flashFramesLeft = 30;
    }
    return true;
  }

  /** Called once per rendered frame so the flash decays with frames. */
  tickFrame(): void {
    if (this.flashFramesLeft > 0) {
      this.flashFramesLeft -= 1;
    }
  }

  curvePoints(): readonly CurvePoint[] {
    return this.curve;
  }

  clearCurve(): void {
    this.curve = [];
  }
}
