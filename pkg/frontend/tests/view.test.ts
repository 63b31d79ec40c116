import { describe, expect, it } from "vitest";

import type { WireSnapshot } from "../src/protocol.js";
import { CURVE_BUFFER_CAPACITY, ViewState } from "../src/view.js";

function snap(time: number, extra: Partial<WireSnapshot> = {}): WireSnapshot {
  return {
    time,
    handlePos: 2e-8,
    tipPos: 1.9e-8,
    handleForce: -1e-11,
    surfaceForce: -1e-11,
    blend: 1,
    events: [],
    ...extra,
  };
}

describe("ViewState", () => {
  it("never renders time backwards", () => {
    const v = new ViewState();
    expect(v.ingest(snap(1.0))).toBe(true);
    expect(v.ingest(snap(0.5))).toBe(false);
    expect(v.ingest(snap(1.0))).toBe(false);
    expect(v.latest!.time).toBe(1.0);
    expect(v.dropped).toBe(2);
  });

  it("bounds the curve buffer at its capacity", () => {
    const v = new ViewState();
    for (let i = 0; i < CURVE_BUFFER_CAPACITY + 500; i++) {
      v.ingest(snap(i * 0.016, { handlePos: i * 1e-11 }));
    }
    expect(v.curvePoints().length).toBe(CURVE_BUFFER_CAPACITY);
    // oldest entries fell off the front
    expect(v.curvePoints()[0].handlePos).toBeCloseTo(500 * 1e-11, 18);
  });

  it("arms the event flash and decays it per frame", () => {
    const v = new ViewState();
    v.ingest(
      snap(1.0, {
        events: [
          { kind: "snap_in", handle_pos: 2.8e-9, tip_gap_before: 1.9e-9, tip_gap_after: 2e-10 },
        ],
      }),
    );
    expect(v.flashFramesLeft).toBeGreaterThan(0);
    const before = v.flashFramesLeft;
    v.tickFrame();
    expect(v.flashFramesLeft).toBe(before - 1);
  });
});
