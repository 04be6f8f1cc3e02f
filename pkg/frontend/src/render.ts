/** Canvas renderer.
 *
 * One function paints the whole frame from the SessionView plus transient
 * overlay state (live drag, replay clock, blocked-gesture cue). Everything
 * drawn comes from server messages or the fixed geometry constants; the
 * progress numbers are rendered verbatim from the view's counters.
 */

import type { Vec2 } from "./protocol";
import type { SessionView } from "./session";
import { effortFill, episodeFill } from "./session";
import type { DragState } from "./gesture";
import type { Palette } from "./palette";
import type { ViewGeometry } from "./view";
import {
  actionToPixelOffset,
  velocityToPixelOffset,
  worldToCanvas,
} from "./view";
import { sampleIndexAt } from "./playback";

export interface RenderOverlay {
  /** Drag in progress, in canvas pixels. */
  drag: DragState | null;
  /** Seconds since the current replay started playing. */
  replayElapsed: number;
  /** Wall clock in ms and the deadline until which the "drags are ignored
   * during replay" cue stays visible. */
  now: number;
  blockedCueUntil: number;
}

function drawArrow(
  ctx: CanvasRenderingContext2D,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  color: string,
  dashed = false,
): void {
  const dx = x1 - x0;
  const dy = y1 - y0;
  const len = Math.hypot(dx, dy);
  if (len < 1e-9) return;
  ctx.save();
  ctx.strokeStyle = color;
  ctx.fillStyle = color;
  ctx.lineWidth = 2;
  if (dashed) ctx.setLineDash([6, 4]);
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.stroke();
  ctx.setLineDash([]);
  const head = Math.min(9, len / 2);
  const ux = dx / len;
  const uy = dy / len;
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - head * (ux + 0.5 * uy), y1 - head * (uy - 0.5 * ux));
  ctx.lineTo(x1 - head * (ux - 0.5 * uy), y1 - head * (uy + 0.5 * ux));
  ctx.closePath();
  ctx.fill();
  ctx.restore();
}

function drawMarker(
  ctx: CanvasRenderingContext2D,
  px: Vec2,
  color: string,
  radius = 6,
): void {
  ctx.save();
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(px[0], px[1], radius, 0, 2 * Math.PI);
  ctx.fill();
  ctx.restore();
}

/** Elbow position for drawing a two-link arm (unit links, base at the
 * origin, elbow kept on one side) whose tip sits at end-effector `p`.
 * Display-only: the wire carries end-effector coordinates, this merely
 * draws plausible link segments under them. */
export function displayElbow(p: Vec2): Vec2 {
  const r = Math.min(Math.hypot(p[0], p[1]), 2 - 1e-9);
  const c2 = Math.max(-1, Math.min(1, (r * r - 2) / 2));
  const q2 = Math.acos(c2);
  const q1 = Math.atan2(p[1], p[0]) - Math.atan2(Math.sin(q2), 1 + Math.cos(q2));
  return [Math.cos(q1), Math.sin(q1)];
}

function drawArm(
  ctx: CanvasRenderingContext2D,
  g: ViewGeometry,
  tip: Vec2,
  pal: Palette,
): void {
  if (g.embodiment !== "SimArm") return;
  const base = worldToCanvas(g, [0, 0]);
  const elbow = worldToCanvas(g, displayElbow(tip));
  const tipPx = worldToCanvas(g, tip);
  ctx.save();
  ctx.strokeStyle = pal.arm;
  ctx.lineWidth = 4;
  ctx.lineCap = "round";
  ctx.beginPath();
  ctx.moveTo(base[0], base[1]);
  ctx.lineTo(elbow[0], elbow[1]);
  ctx.lineTo(tipPx[0], tipPx[1]);
  ctx.stroke();
  ctx.restore();
  drawMarker(ctx, base, pal.frame, 4);
}

function drawWorkspace(
  ctx: CanvasRenderingContext2D,
  g: ViewGeometry,
  pal: Palette,
): void {
  const [[x0, y0], [x1, y1]] = g.workspace;
  const topLeft = worldToCanvas(g, [x0, y1]);
  const bottomRight = worldToCanvas(g, [x1, y0]);
  ctx.save();
  ctx.strokeStyle = pal.frame;
  ctx.lineWidth = 1;
  ctx.strokeRect(
    topLeft[0],
    topLeft[1],
    bottomRight[0] - topLeft[0],
    bottomRight[1] - topLeft[1],
  );
  ctx.restore();
}

function drawBar(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  w: number,
  fill: number,
  label: string,
  pal: Palette,
): void {
  ctx.save();
  ctx.strokeStyle = pal.frame;
  ctx.strokeRect(x, y, w, 10);
  ctx.fillStyle = pal.progress;
  ctx.fillRect(x, y, w * Math.max(0, Math.min(1, fill)), 10);
  ctx.fillStyle = pal.text;
  ctx.font = "11px system-ui, sans-serif";
  ctx.textAlign = "right";
  ctx.fillText(label, x - 6, y + 9);
  ctx.restore();
}

function text(
  ctx: CanvasRenderingContext2D,
  s: string,
  x: number,
  y: number,
  color: string,
  font = "12px system-ui, sans-serif",
  align: CanvasTextAlign = "left",
): void {
  ctx.save();
  ctx.fillStyle = color;
  ctx.font = font;
  ctx.textAlign = align;
  ctx.fillText(s, x, y);
  ctx.restore();
}

function drawGuidance(
  ctx: CanvasRenderingContext2D,
  view: SessionView,
  g: ViewGeometry,
  pal: Palette,
): void {
  const guidance = view.guidance;
  if (guidance === null) return;
  for (const rec of guidance.per_state) {
    const px = worldToCanvas(g, rec.position);
    drawMarker(ctx, px, pal.marker, 4);
    const ua = actionToPixelOffset(g, rec.user_action);
    drawArrow(ctx, px[0], px[1], px[0] + ua[0], px[1] + ua[1], pal.userAction);
    const oa = actionToPixelOffset(g, rec.optimal_action);
    drawArrow(
      ctx,
      px[0],
      px[1],
      px[0] + oa[0],
      px[1] + oa[1],
      pal.optimalAction,
      true,
    );
  }
  text(
    ctx,
    `episode action residual = ${guidance.episode_R2.toFixed(3)}`,
    g.canvasWidth / 2,
    40,
    pal.text,
    "13px system-ui, sans-serif",
    "center",
  );
  text(
    ctx,
    "solid: your action · dashed: suggested · press Next",
    g.canvasWidth / 2,
    56,
    pal.banner,
    "12px system-ui, sans-serif",
    "center",
  );
}

function drawReplay(
  ctx: CanvasRenderingContext2D,
  view: SessionView,
  g: ViewGeometry,
  pal: Palette,
  elapsed: number,
): void {
  const replay = view.replay;
  if (replay === null) return;
  const positions = replay.trajectory.positions;
  const timing = { dt: replay.trajectory.dt, sampleCount: positions.length };
  const i = sampleIndexAt(timing, elapsed);
  ctx.save();
  ctx.strokeStyle = pal.trail;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  for (let k = 0; k <= i; k += 1) {
    const p = positions[k];
    if (p === undefined) break;
    const px = worldToCanvas(g, p);
    if (k === 0) ctx.moveTo(px[0], px[1]);
    else ctx.lineTo(px[0], px[1]);
  }
  ctx.stroke();
  ctx.restore();
  const tip = positions[i];
  if (tip !== undefined) {
    drawArm(ctx, g, tip, pal);
    drawMarker(ctx, worldToCanvas(g, tip), pal.marker);
  }
  text(
    ctx,
    `replaying learned attempt · ${elapsed.toFixed(1)} s`,
    g.canvasWidth / 2,
    40,
    pal.text,
    "13px system-ui, sans-serif",
    "center",
  );
}

function drawQuery(
  ctx: CanvasRenderingContext2D,
  view: SessionView,
  g: ViewGeometry,
  pal: Palette,
  drag: DragState | null,
): void {
  const query = view.query;
  if (query === null) return;
  const px = worldToCanvas(g, query.position);
  drawArm(ctx, g, query.position, pal);
  drawMarker(ctx, px, pal.marker);
  const v = velocityToPixelOffset(g, query.velocity);
  if (Math.hypot(v[0], v[1]) > 1e-9) {
    drawArrow(ctx, px[0], px[1], px[0] + v[0], px[1] + v[1], pal.velocity);
  }
  if (drag !== null) {
    drawArrow(ctx, drag.startX, drag.startY, drag.x, drag.y, pal.drag);
  }
  text(
    ctx,
    "drag to demonstrate the correction",
    g.canvasWidth / 2,
    40,
    pal.banner,
    "12px system-ui, sans-serif",
    "center",
  );
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  view: SessionView,
  g: ViewGeometry,
  pal: Palette,
  overlay: RenderOverlay,
): void {
  ctx.fillStyle = pal.background;
  ctx.fillRect(0, 0, g.canvasWidth, g.canvasHeight);
  drawWorkspace(ctx, g, pal);

  text(ctx, view.banner, 12, 20, pal.text, "15px system-ui, sans-serif");
  if (view.phaseNotice !== null) {
    text(
      ctx,
      `teaching: ${view.phaseNotice.skillName}`,
      12,
      38,
      pal.banner,
    );
  }
  drawBar(
    ctx,
    g.canvasWidth - 150,
    12,
    130,
    effortFill(view),
    `demos ${view.progress.effortUsed}/${view.progress.effortBudget}`,
    pal,
  );
  drawBar(
    ctx,
    g.canvasWidth - 150,
    30,
    130,
    episodeFill(view),
    `episodes ${view.progress.episodesDone}/${view.progress.totalEpisodes}`,
    pal,
  );
  text(
    ctx,
    `${g.positionCaption} · drag scale ${g.actionCaption}`,
    12,
    g.canvasHeight - 12,
    pal.banner,
  );

  if (view.finished) {
    text(
      ctx,
      "session complete, thank you",
      g.canvasWidth / 2,
      g.canvasHeight / 2,
      pal.text,
      "17px system-ui, sans-serif",
      "center",
    );
  } else if (view.replay !== null) {
    drawReplay(ctx, view, g, pal, overlay.replayElapsed);
  } else if (view.guidance !== null) {
    drawGuidance(ctx, view, g, pal);
  } else {
    drawQuery(ctx, view, g, pal, overlay.drag);
  }

  if (overlay.now < overlay.blockedCueUntil) {
    text(
      ctx,
      "replay in progress, drawing is paused",
      g.canvasWidth / 2,
      g.canvasHeight - 32,
      pal.error,
      "13px system-ui, sans-serif",
      "center",
    );
  }
  if (view.lastError !== null) {
    text(
      ctx,
      `error [${view.lastError.code}]: ${view.lastError.message}`,
      12,
      g.canvasHeight - 28,
      pal.error,
    );
  }
}
