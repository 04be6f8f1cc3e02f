/** Drag-to-action gesture tracking.
 *
 * A demonstration is drawn by dragging on the canvas: the drag vector in
 * pixels, divided by the embodiment's published scale, is the action.
 * Drags shorter than MIN_DRAG_PX are discarded as accidental clicks.
 */

import type { Vec2 } from "./protocol";
import type { ViewGeometry } from "./view";
import { pixelsToAction } from "./view";

/** Minimum drag length in pixels for a gesture to count as an action. */
export const MIN_DRAG_PX = 6;

export interface DragState {
  startX: number;
  startY: number;
  x: number;
  y: number;
}

export class DragTracker {
  private drag: DragState | null = null;

  begin(x: number, y: number): void {
    this.drag = { startX: x, startY: y, x, y };
  }

  move(x: number, y: number): void {
    if (this.drag === null) return;
    this.drag.x = x;
    this.drag.y = y;
  }

  /** Current drag for live rendering, or null when not dragging. */
  current(): DragState | null {
    return this.drag;
  }

  cancel(): void {
    this.drag = null;
  }

  /** Finish the drag; returns the action it encodes, or null when the drag
   * was below the click threshold. */
  end(x: number, y: number, geometry: ViewGeometry): Vec2 | null {
    if (this.drag === null) return null;
    const dx = x - this.drag.startX;
    const dy = y - this.drag.startY;
    this.drag = null;
    if (Math.hypot(dx, dy) < MIN_DRAG_PX) return null;
    return pixelsToAction(geometry, dx, dy);
  }
}
