import { describe, expect, it } from "vitest";

import { DragTracker, MIN_DRAG_PX } from "../src/gesture";
import { VIEW_GEOMETRY } from "../src/view";

const SIM = VIEW_GEOMETRY.SimArm;

describe("DragTracker", () => {
  it("turns a drag into the scaled action with y flipped", () => {
    const t = new DragTracker();
    t.begin(100, 100);
    t.move(150, 60);
    expect(t.current()).toEqual({ startX: 100, startY: 100, x: 150, y: 60 });
    expect(t.end(200, 20, SIM)).toEqual([2, 1.6]);
    expect(t.current()).toBeNull();
  });

  it("discards drags shorter than the click threshold", () => {
    const t = new DragTracker();
    t.begin(10, 10);
    expect(t.end(12, 11, SIM)).toBeNull();
    t.begin(10, 10);
    expect(t.end(10, 10 + MIN_DRAG_PX, SIM)).toEqual([0, -MIN_DRAG_PX / 50]);
  });

  it("ignores end and move without a begin", () => {
    const t = new DragTracker();
    t.move(5, 5);
    expect(t.current()).toBeNull();
    expect(t.end(50, 50, SIM)).toBeNull();
  });

  it("cancel clears the drag", () => {
    const t = new DragTracker();
    t.begin(0, 0);
    t.cancel();
    expect(t.current()).toBeNull();
    expect(t.end(100, 100, SIM)).toBeNull();
  });
});
