/**
 * Browser wiring: WebSocket in, canvas + Web Audio out, pointer back.
 *
 * All logic lives in the pure modules (view/scene/sonify/pointer/curve);
 * this file only touches the DOM, the socket, and the audio graph, so it
 * stays untested and boring on purpose.
 */

import { curvePolyline } from "./curve.js";
import { PointerCoalescer, type Calibration } from "./pointer.js";
import { encodeReset, encodeSetBlend, parseServerFrame } from "./protocol.js";
import { renderScene, type DrawItem, type Viewport } from "./scene.js";
import { gainDbToLinear, sonify } from "./sonify.js";
import { ViewState } from "./view.js";

const view = new ViewState();
const coalescer = new PointerCoalescer();

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const plot = document.getElementById("plot") as HTMLCanvasElement;
const blendSlider = document.getElementById("blend") as HTMLInputElement;
const audioToggle = document.getElementById("audio") as HTMLInputElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;
const status = document.getElementById("status") as HTMLElement;

const viewport: Viewport = {
  width: canvas.width,
  height: canvas.height,
  topZ: 5e-8,
  bottomZ: -2e-9,
};
const calibration: Calibration = {
  topZ: viewport.topZ,
  bottomZ: viewport.bottomZ,
  heightPx: canvas.height,
};

// --- network ---------------------------------------------------------------

let ws: WebSocket | null = null;

function connect(): void {
  const url = `ws://${location.host}/ws`;
  ws = new WebSocket(url);
  ws.onopen = () => {
    view.connected = true;
    status.textContent = "connected";
  };
  ws.onclose = () => {
    view.connected = false;
    status.textContent = "disconnected";
    setTimeout(connect, 1000);
  };
  ws.onmessage = (msg) => {
    const frame = parseServerFrame(String(msg.data));
    if (frame.type === "snapshot") {
      view.ingest(frame.snapshot);
    } else if (frame.notice.type === "error") {
      status.textContent = `server error: ${frame.notice.message ?? ""}`;
    }
  };
}
connect();

// --- input -----------------------------------------------------------------

let pointerDown = false;
canvas.addEventListener("pointerdown", (e) => {
  pointerDown = true;
  coalescer.onPointer(e.offsetY, calibration);
});
canvas.addEventListener("pointermove", (e) => {
  if (pointerDown) coalescer.onPointer(e.offsetY, calibration);
});
window.addEventListener("pointerup", () => {
  pointerDown = false;
});

blendSlider.addEventListener("input", () => {
  ws?.send(encodeSetBlend(coalescer.nextSeq(), Number(blendSlider.value)));
});
resetButton.addEventListener("click", () => {
  ws?.send(encodeReset(coalescer.nextSeq()));
  view.clearCurve();
});
audioToggle.addEventListener("change", () => {
  view.audioEnabled = audioToggle.checked;
  if (view.audioEnabled) ensureAudio();
});

// --- audio -----------------------------------------------------------------

let audioCtx: AudioContext | null = null;
let gainNode: GainNode | null = null;
let oscSine: OscillatorNode | null = null;
let oscSquare: OscillatorNode | null = null;
let sineGain: GainNode | null = null;
let squareGain: GainNode | null = null;

function ensureAudio(): void {
  if (audioCtx !== null) return;
  try {
    audioCtx = new AudioContext();
  } catch {
    view.audioEnabled = false; // no audio context: stay visual-only
    return;
  }
  gainNode = audioCtx.createGain();
  gainNode.gain.value = 0;
  gainNode.connect(audioCtx.destination);
  sineGain = audioCtx.createGain();
  squareGain = audioCtx.createGain();
  sineGain.connect(gainNode);
  squareGain.connect(gainNode);
  oscSine = audioCtx.createOscillator();
  oscSine.type = "sine";
  oscSine.frequency.value = 220;
  oscSine.connect(sineGain);
  oscSine.start();
  oscSquare = audioCtx.createOscillator();
  oscSquare.type = "square";
  oscSquare.frequency.value = 220;
  oscSquare.connect(squareGain);
  oscSquare.start();
}

let prevAudioSnap: { tipPos: number; surfaceForce: number } | null = null;

function updateAudio(): void {
  if (!view.audioEnabled || audioCtx === null || view.latest === null) {
    gainNode?.gain.setTargetAtTime(0, audioCtx?.currentTime ?? 0, 0.02);
    return;
  }
  const snap = view.latest;
  // stiffness proxy: finite difference of surface force over tip motion
  let grad = 0;
  if (prevAudioSnap !== null && snap.tipPos !== prevAudioSnap.tipPos) {
    grad = (snap.surfaceForce - prevAudioSnap.surfaceForce) / (snap.tipPos - prevAudioSnap.tipPos);
  }
  prevAudioSnap = { tipPos: snap.tipPos, surfaceForce: snap.surfaceForce };
  const params = sonify(snap.handleForce, grad);
  const linear = gainDbToLinear(params.gainDb);
  gainNode!.gain.setTargetAtTime(linear, audioCtx.currentTime, 0.02);
  sineGain!.gain.setTargetAtTime(params.timbre === "sine" ? 1 : 0, audioCtx.currentTime, 0.02);
  squareGain!.gain.setTargetAtTime(params.timbre === "square" ? 1 : 0, audioCtx.currentTime, 0.02);
  oscSine!.frequency.setTargetAtTime(params.freqHz, audioCtx.currentTime, 0.05);
  oscSquare!.frequency.setTargetAtTime(params.freqHz, audioCtx.currentTime, 0.05);
}

// --- rendering -------------------------------------------------------------

const ctx = canvas.getContext("2d")!;
const plotCtx = plot.getContext("2d")!;

function draw(items: DrawItem[]): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (const it of items) {
    switch (it.kind) {
      case "background": {
        ctx.fillStyle = `rgba(92, 64, 38, ${0.25 * it.macroAlpha})`;
        ctx.fillRect(0, 0, canvas.width, canvas.height);
        ctx.fillStyle = `rgba(20, 40, 80, ${0.3 * it.nanoAlpha})`;
        ctx.fillRect(0, 0, canvas.width, canvas.height);
        break;
      }
      case "table": {
        ctx.fillStyle = `rgba(140, 90, 40, ${it.alpha})`;
        ctx.fillRect(0, it.y, canvas.width, canvas.height - it.y);
        break;
      }
      case "atoms": {
        ctx.fillStyle = `rgba(120, 180, 255, ${it.alpha})`;
        for (let x = it.spacingPx / 2; x < canvas.width; x += it.spacingPx) {
          ctx.beginPath();
          ctx.arc(x, it.y + 7, 5, 0, 2 * Math.PI);
          ctx.fill();
        }
        break;
      }
      case "surface": {
        ctx.strokeStyle = "#888";
        ctx.beginPath();
        ctx.moveTo(0, it.y);
        ctx.lineTo(canvas.width, it.y);
        ctx.stroke();
        break;
      }
      case "handle": {
        ctx.fillStyle = "#eee";
        ctx.fillRect(it.x - 25, it.y - 4, 50, 8);
        break;
      }
      case "spring": {
        ctx.strokeStyle = "#ccc";
        ctx.beginPath();
        const coils = 8;
        const span = it.bottomY - it.topY;
        for (let i = 0; i <= coils * 2; i++) {
          const y = it.topY + (span * i) / (coils * 2);
          const x = it.x + (i % 2 === 0 ? 0 : 10);
          if (i === 0) ctx.moveTo(x, y);
          else ctx.lineTo(x, y);
        }
        ctx.stroke();
        break;
      }
      case "tip": {
        ctx.fillStyle = "#ffd24d";
        ctx.beginPath();
        ctx.arc(it.x, it.y, it.radiusPx, 0, 2 * Math.PI);
        ctx.fill();
        break;
      }
      case "blendSlider": {
        blendSlider.value = String(it.value);
        break;
      }
      case "flash": {
        ctx.fillStyle = `rgba(255, 80, 80, ${0.6 * it.intensity})`;
        ctx.fillRect(0, 0, canvas.width, 30);
        ctx.fillStyle = "#fff";
        ctx.fillText(it.label, 8, 20);
        break;
      }
      case "overlay": {
        if (it.dimmed) {
          ctx.fillStyle = "rgba(0,0,0,0.5)";
          ctx.fillRect(0, 0, canvas.width, canvas.height);
        }
        ctx.fillStyle = "#fff";
        ctx.fillText(it.text, 10, canvas.height / 2);
        break;
      }
    }
  }
}

function drawPlot(): void {
  plotCtx.clearRect(0, 0, plot.width, plot.height);
  const line = curvePolyline(view.curvePoints(), plot.width, plot.height);
  if (line.length < 2) return;
  plotCtx.strokeStyle = "#6cf";
  plotCtx.beginPath();
  plotCtx.moveTo(line[0].x, line[0].y);
  for (const p of line.slice(1)) plotCtx.lineTo(p.x, p.y);
  plotCtx.stroke();
}

function frame(): void {
  const cmd = coalescer.flush();
  if (cmd !== null && ws !== null && ws.readyState === WebSocket.OPEN) {
    ws.send(cmd);
  }
  draw(renderScene(view, viewport));
  drawPlot();
  updateAudio();
  view.tickFrame();
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
