/**
 * Replay acceptance: drive the real render + sonification path from a
 * recorded snap-in sweep (tests/fixtures/snapin.csv, produced by the
 * headless sweep CLI) and check what an operator would see and hear.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { parseCurveCsv } from "../src/curve.js";
import { CurveReplayer } from "../src/replay.js";
import { renderScene, tipPixelY, type Viewport } from "../src/scene.js";
import { sonify } from "../src/sonify.js";
import { ViewState } from "../src/view.js";

const here = dirname(fileURLToPath(import.meta.url));
const FIXTURE = readFileSync(join(here, "fixtures", "snapin.csv"), "utf-8");
const VP: Viewport = { width: 560, height: 520, topZ: 4.5e-8, bottomZ: -2e-9 };

function replayAll() {
  const curve = parseCurveCsv(FIXTURE);
  const replayer = new CurveReplayer(curve);
  const view = new ViewState();
  view.connected = true;
  const tipYs: number[] = [];
  const gains: number[] = [];
  const eventFrames: number[] = [];
  let frame = 0;
  for (;;) {
    const snap = replayer.next();
    if (snap === null) break;
    if (!view.ingest(snap)) continue;
    const items = renderScene(view, VP);
    tipYs.push(tipPixelY(items));
    gains.push(sonify(snap.handleForce).gainDb);
    if (snap.events.length > 0) eventFrames.push(frame);
    view.tickFrame();
    frame += 1;
  }
  return { curve, tipYs, gains, eventFrames };
}

describe("replaying a recorded snap-in sweep", () => {
  it("the fixture really contains a snap-in and a snap-off", () => {
    const curve = parseCurveCsv(FIXTURE);
    expect(curve.events.map((e) => e.kind)).toEqual(["snap_in", "snap_off"]);
    expect(curve.rows.length).toBeGreaterThan(400);
  });

  it("shows a discontinuous tip jump on screen at the event sample", () => {
    const { tipYs, eventFrames } = replayAll();
    const deltas = tipYs.slice(1).map((y, i) => Math.abs(y - tipYs[i]));
    const snapIn = eventFrames[0];
    // The event anchor sits inside the sample window, so the on-screen
    // jump lands on the event frame or its immediate neighbor.
    const nearEvent = deltas.slice(snapIn - 2, snapIn + 2);
    const jump = Math.max(...nearEvent);
    // visible: tens of pixels in one frame...
    expect(jump).toBeGreaterThan(15);
    // ...and discontinuous: an order above the approach-branch motion
    const baseline = deltas.slice(snapIn - 62, snapIn - 3).sort((a, b) => a - b);
    const typical = baseline[Math.floor(baseline.length / 2)];
    expect(jump).toBeGreaterThan(10 * typical);
  });

  it("produces an audible gain step at the snap-in sample", () => {
    const { gains, eventFrames } = replayAll();
    const snapIn = eventFrames[0];
    const steps = [];
    for (let i = snapIn - 1; i <= snapIn + 1; i++) {
      steps.push(Math.abs(gains[i] - gains[i - 1]));
    }
    const step = Math.max(...steps);
    expect(step).toBeGreaterThan(3); // > 3 dB in one frame is clearly audible
    // background drift per frame is far smaller on the approach branch
    const drifts = [];
    for (let i = 50; i < snapIn - 5; i++) drifts.push(Math.abs(gains[i] - gains[i - 1]));
    const typical = drifts.sort((a, b) => a - b)[Math.floor(drifts.length / 2)];
    expect(step).toBeGreaterThan(5 * typical);
  });

  it("rises monotonically in gain while approaching, before the snap", () => {
    const { gains, eventFrames } = replayAll();
    const snapIn = eventFrames[0];
    let violations = 0;
    for (let i = 40; i < snapIn - 2; i++) {
      if (gains[i + 1] < gains[i] - 1e-9) violations += 1;
    }
    expect(violations).toBe(0);
  });

  it("fills the force-curve buffer sample-for-sample from the recording", () => {
    const curve = parseCurveCsv(FIXTURE);
    const replayer = new CurveReplayer(curve);
    const view = new ViewState();
    view.connected = true;
    for (;;) {
      const snap = replayer.next();
      if (snap === null) break;
      view.ingest(snap);
    }
    const points = view.curvePoints();
    // the duplicated turnaround row is deduplicated by the time monotone rule
    const kept: typeof curve.rows = [];
    for (const row of curve.rows) {
      if (kept.length === 0 || row.time > kept[kept.length - 1].time) kept.push(row);
    }
    expect(points.length).toBe(kept.length);
    for (let i = 0; i < points.length; i++) {
      expect(points[i].handlePos).toBe(kept[i].handlePos);
      expect(points[i].handleForce).toBe(kept[i].handleForce);
    }
  });

  it("holds the 30 fps rendering budget on the replay", () => {
    const curve = parseCurveCsv(FIXTURE);
    const replayer = new CurveReplayer(curve);
    const view = new ViewState();
    view.connected = true;
    const t0 = performance.now();
    let frames = 0;
    for (;;) {
      const snap = replayer.next();
      if (snap === null) break;
      view.ingest(snap);
      renderScene(view, VP);
      sonify(snap.handleForce);
      view.tickFrame();
      frames += 1;
    }
    const perFrameMs = (performance.now() - t0) / frames;
    // full frame budget at 30 fps is 33 ms; scene computation must be a
    // small slice of it, leaving the rest for canvas rasterization
    expect(perFrameMs).toBeLessThan(5);
  });
});
