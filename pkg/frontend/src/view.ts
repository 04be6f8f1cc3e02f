/** Canvas geometry: fixed, documented scales between screen pixels and the
 * embodiment's units.
 *
 * The scales are constants printed on screen so any logged action is exactly
 * reconstructable from the pixel gesture that produced it: a drag of
 * `(dx, dy)` integer pixels maps to the action `(dx/actionScale,
 * -dy/actionScale)` (screen y points down, world y up), and
 * `actionToPixels` rounds back to those exact integers.
 */

import type { Embodiment, Vec2 } from "./protocol";

export interface ViewGeometry {
  embodiment: Embodiment;
  canvasWidth: number;
  canvasHeight: number;
  /** Pixels per position unit (m or cm). */
  positionScale: number;
  /** Pixels per action unit (N or cm); the documented gesture scale. */
  actionScale: number;
  /** Pixels per velocity unit (m/s); kinematic velocities are always zero. */
  velocityScale: number;
  /** Human-readable captions shown next to the canvas. */
  positionCaption: string;
  actionCaption: string;
  /** Workspace corners [[x_min, y_min], [x_max, y_max]] in world units. */
  workspace: [Vec2, Vec2];
}

export const CANVAS_WIDTH = 640;
export const CANVAS_HEIGHT = 480;

/** Fixed per-embodiment geometry; workspace values match SessionStarted. */
export const VIEW_GEOMETRY: Record<Embodiment, ViewGeometry> = {
  SimArm: {
    embodiment: "SimArm",
    canvasWidth: CANVAS_WIDTH,
    canvasHeight: CANVAS_HEIGHT,
    positionScale: 110, // px per m: 4 m x 2 m workspace -> 440 x 220 px
    actionScale: 50, // px per N
    velocityScale: 50, // px per m/s
    positionCaption: "110 px per m",
    actionCaption: "50 px per N",
    workspace: [
      [-2, 0],
      [2, 2],
    ],
  },
  KinematicArm: {
    embodiment: "KinematicArm",
    canvasWidth: CANVAS_WIDTH,
    canvasHeight: CANVAS_HEIGHT,
    positionScale: 10, // px per cm: 27 cm x 40 cm workspace -> 270 x 400 px
    actionScale: 10, // px per cm
    velocityScale: 10,
    positionCaption: "10 px per cm",
    actionCaption: "10 px per cm",
    workspace: [
      [5, -20],
      [32, 20],
    ],
  },
};

function workspaceCenter(g: ViewGeometry): Vec2 {
  const [[x0, y0], [x1, y1]] = g.workspace;
  return [(x0 + x1) / 2, (y0 + y1) / 2];
}

/** World position -> canvas pixel; workspace center maps to canvas center,
 * world y up, screen y down. */
export function worldToCanvas(g: ViewGeometry, p: Vec2): Vec2 {
  const [cx, cy] = workspaceCenter(g);
  return [
    g.canvasWidth / 2 + (p[0] - cx) * g.positionScale,
    g.canvasHeight / 2 - (p[1] - cy) * g.positionScale,
  ];
}

/** Canvas pixel -> world position (inverse of worldToCanvas). */
export function canvasToWorld(g: ViewGeometry, px: Vec2): Vec2 {
  const [cx, cy] = workspaceCenter(g);
  return [
    cx + (px[0] - g.canvasWidth / 2) / g.positionScale,
    cy - (px[1] - g.canvasHeight / 2) / g.positionScale,
  ];
}

/** Pixel drag delta (screen axes) -> action vector in embodiment units.
 * Written as (0 - dy) so a horizontal drag yields +0, not -0. */
export function pixelsToAction(g: ViewGeometry, dx: number, dy: number): Vec2 {
  return [dx / g.actionScale, (0 - dy) / g.actionScale];
}

/** Action vector -> the integer pixel drag that produced it. Exact for any
 * gesture captured in integer pixels: the float round trip errs by far less
 * than half a pixel, so rounding restores the original integers. */
export function actionToPixels(g: ViewGeometry, u: Vec2): Vec2 {
  return [Math.round(u[0] * g.actionScale), Math.round(-u[1] * g.actionScale)];
}

/** Unrounded pixel delta for drawing an action as an arrow on screen. */
export function actionToPixelOffset(g: ViewGeometry, u: Vec2): Vec2 {
  return [u[0] * g.actionScale, -u[1] * g.actionScale];
}

/** Velocity -> pixel offset for the velocity arrow. */
export function velocityToPixelOffset(g: ViewGeometry, v: Vec2): Vec2 {
  return [v[0] * g.velocityScale, -v[1] * g.velocityScale];
}
