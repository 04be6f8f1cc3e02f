/** Browser entry point: wires the canvas, controls, and WebSocket client
 * into a single requestAnimationFrame loop. Server messages are applied in
 * arrival order by SessionClient; this file only routes DOM events to wire
 * messages and repaints.
 */

import "./style.css";

import type { Embodiment } from "./protocol";
import { SessionClient } from "./client";
import { ackGuidance, canSubmit } from "./session";
import { DragTracker } from "./gesture";
import { durationSeconds, playbackDone } from "./playback";
import { GREEN_PALETTE, togglePalette, type Palette } from "./palette";
import { renderScene, type RenderOverlay } from "./render";
import { CANVAS_HEIGHT, CANVAS_WIDTH, VIEW_GEOMETRY } from "./view";

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

const canvas = must<HTMLCanvasElement>("stage");
canvas.width = CANVAS_WIDTH;
canvas.height = CANVAS_HEIGHT;
const ctx = canvas.getContext("2d");
if (ctx === null) throw new Error("canvas 2d context unavailable");

const serverInput = must<HTMLInputElement>("server");
const embodimentSelect = must<HTMLSelectElement>("embodiment");
const seedInput = must<HTMLInputElement>("seed");
const startButton = must<HTMLButtonElement>("start");
const reconnectButton = must<HTMLButtonElement>("reconnect");
const nextButton = must<HTMLButtonElement>("next");
const continueButton = must<HTMLButtonElement>("continue");
const paletteButton = must<HTMLButtonElement>("palette");
const statusLine = must<HTMLElement>("status");

let palette: Palette = GREEN_PALETTE;
let replayStartedAt = 0;
let blockedCueUntil = 0;
const tracker = new DragTracker();

const client = new SessionClient({
  onChange(_view, msg) {
    if (msg.type === "Replay") replayStartedAt = performance.now();
    syncControls();
  },
  onConnection(state) {
    statusLine.textContent =
      state === "connected" && client.view.sessionId !== null
        ? `${state} · ${client.view.sessionId}`
        : state;
    reconnectButton.hidden = !(
      state === "disconnected" && client.view.sessionId !== null
    );
    syncControls();
  },
  onBadFrame() {
    statusLine.textContent = "received an unreadable message";
  },
});

function geometry() {
  const embodiment =
    client.view.embodiment ?? (embodimentSelect.value as Embodiment);
  return VIEW_GEOMETRY[embodiment];
}

function replayElapsedSeconds(): number {
  return client.view.replay === null
    ? 0
    : (performance.now() - replayStartedAt) / 1000;
}

function syncControls(): void {
  const view = client.view;
  nextButton.hidden = view.guidance === null;
  const replay = view.replay;
  continueButton.hidden = replay === null;
  if (replay !== null) {
    const timing = {
      dt: replay.trajectory.dt,
      sampleCount: replay.trajectory.positions.length,
    };
    const elapsed = replayElapsedSeconds();
    continueButton.disabled = !playbackDone(timing, elapsed);
    const wait = Math.max(0, durationSeconds(timing) - elapsed);
    continueButton.textContent =
      wait > 0 ? `Continue (${Math.ceil(wait)} s)` : "Continue";
  }
  if (view.sessionId !== null && client.connection === "connected") {
    statusLine.textContent = `connected · ${view.sessionId}`;
  }
}

startButton.addEventListener("click", () => {
  const embodiment = embodimentSelect.value as Embodiment;
  const seedRaw = seedInput.value.trim();
  const seed = seedRaw === "" ? undefined : Number(seedRaw);
  const begin = () => client.startSession(embodiment, seed);
  if (client.connection === "connected") begin();
  else client.connect(serverInput.value.trim(), begin);
});

reconnectButton.addEventListener("click", () => {
  client.connect(serverInput.value.trim());
});

nextButton.addEventListener("click", () => {
  ackGuidance(client.view);
  syncControls();
});

continueButton.addEventListener("click", () => {
  client.acknowledgeReplay();
});

paletteButton.addEventListener("click", () => {
  palette = togglePalette(palette);
  paletteButton.textContent = `palette: ${palette.name}`;
});

function canvasPoint(ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [ev.clientX - rect.left, ev.clientY - rect.top];
}

canvas.addEventListener("pointerdown", (ev) => {
  const [x, y] = canvasPoint(ev);
  if (canSubmit(client.view)) {
    canvas.setPointerCapture(ev.pointerId);
    tracker.begin(x, y);
  } else if (client.view.replay !== null) {
    blockedCueUntil = performance.now() + 1500;
  }
});

canvas.addEventListener("pointermove", (ev) => {
  const [x, y] = canvasPoint(ev);
  tracker.move(x, y);
});

canvas.addEventListener("pointerup", (ev) => {
  const [x, y] = canvasPoint(ev);
  const action = tracker.end(x, y, geometry());
  if (action !== null && canSubmit(client.view)) {
    client.submitAction(action);
  }
});

canvas.addEventListener("pointercancel", () => tracker.cancel());

function frame(): void {
  const overlay: RenderOverlay = {
    drag: tracker.current(),
    replayElapsed: replayElapsedSeconds(),
    now: performance.now(),
    blockedCueUntil,
  };
  renderScene(ctx as CanvasRenderingContext2D, client.view, geometry(), palette, overlay);
  if (client.view.replay !== null) syncControls();
  requestAnimationFrame(frame);
}

syncControls();
requestAnimationFrame(frame);
