/**
 * Pure scene renderer: ViewState + viewport in, draw list out.
 *
 * The draw list is plain data so tests can assert geometry without a
 * canvas; main.ts rasterizes it. Layout follows the exhibition screen:
 * the same strip reads as a wood table at meter scale or an atomic layer
 * at nano scale, cross-faded by the blend value, with the elastic stick
 * drawn from handle to tip and the spring's stretch made visible.
 */

import type { ViewState } from "./view.js";

export interface Viewport {
  width: number;
  height: number;
  /** handle height rendered at the top edge (m) */
  topZ: number;
  /** handle height rendered at the surface line (m) */
  bottomZ: number;
}

export type DrawItem =
  | { kind: "background"; macroAlpha: number; nanoAlpha: number }
  | { kind: "surface"; y: number }
  | { kind: "table"; y: number; alpha: number }
  | { kind: "atoms"; y: number; alpha: number; spacingPx: number }
  | { kind: "handle"; y: number; x: number }
  | { kind: "spring"; x: number; topY: number; bottomY: number; extensionPx: number }
  | { kind: "tip"; x: number; y: number; radiusPx: number }
  | { kind: "blendSlider"; value: number }
  | { kind: "flash"; label: string; intensity: number }
  | { kind: "overlay"; text: string; dimmed: boolean };

export function zToPixel(z: number, vp: Viewport): number {
  const frac = (vp.topZ - z) / (vp.topZ - vp.bottomZ);
  return frac * vp.height;
}

export function renderScene(view: ViewState, vp: Viewport): DrawItem[] {
  if (!view.connected || view.latest === null) {
    return [
      { kind: "background", macroAlpha: 0.5, nanoAlpha: 0.5 },
      { kind: "overlay", text: "disconnected - reconnecting...", dimmed: true },
    ];
  }
  const snap = view.latest;
  const items: DrawItem[] = [];
  const surfaceY = zToPixel(0, vp);
  const stickX = vp.width * 0.5;

  items.push({ kind: "background", macroAlpha: 1 - snap.blend, nanoAlpha: snap.blend });
  if (snap.blend < 1) {
    items.push({ kind: "table", y: surfaceY, alpha: 1 - snap.blend });
  }
  if (snap.blend > 0) {
    items.push({ kind: "atoms", y: surfaceY, alpha: snap.blend, spacingPx: 14 });
  }
  items.push({ kind: "surface", y: surfaceY });

  const handleY = zToPixel(snap.handlePos, vp);
  const tipY = zToPixel(snap.tipPos, vp);
  items.push({ kind: "handle", y: handleY, x: stickX });
  items.push({
    kind: "spring",
    x: stickX,
    topY: handleY,
    bottomY: tipY,
    extensionPx: tipY - handleY,
  });
  items.push({ kind: "tip", x: stickX, y: tipY, radiusPx: 6 });
  items.push({ kind: "blendSlider", value: snap.blend });

  if (view.flashFramesLeft > 0 && view.lastEvent !== null) {
    items.push({
      kind: "flash",
      label: view.lastEvent.kind,
      intensity: view.flashFramesLeft / 30,
    });
  }
  return items;
}

/** Convenience for tests and the HUD: the tip's screen position. */
export function tipPixelY(items: DrawItem[]): number {
  const tip = items.find((it) => it.kind === "tip");
  if (tip === undefined || tip.kind !== "tip") {
    throw new Error("draw list has no tip");
  }
  return tip.y;
}

export function springExtensionPx(items: DrawItem[]): number {
  const spring = items.find((it) => it.kind === "spring");
  if (spring === undefined || spring.kind !== "spring") {
    throw new Error("draw list has no spring");
  }
  return spring.extensionPx;
}
