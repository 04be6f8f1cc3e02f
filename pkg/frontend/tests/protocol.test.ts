import { describe, expect, it } from "vitest";

import {
  acknowledgeReplay,
  isServerMessage,
  isVec2,
  parseServerMessage,
  resume,
  startSession,
  submitAction,
} from "../src/protocol";
import {
  errorMessage,
  guidance,
  phaseChanged,
  queryState,
  replay,
  sessionFinished,
  sessionStarted,
} from "./fixtures";

function roundTrip(msg: unknown): unknown {
  return parseServerMessage(JSON.stringify(msg));
}

describe("parseServerMessage", () => {
  it("accepts every server message kind", () => {
    for (const msg of [
      sessionStarted(),
      queryState(),
      guidance(),
      replay(),
      phaseChanged(),
      sessionFinished(),
      errorMessage(),
    ]) {
      expect(roundTrip(msg)).toEqual(msg);
    }
  });

  it("accepts Error with a null session id", () => {
    const msg = { ...errorMessage("malformed"), session_id: null };
    expect(roundTrip(msg)).toEqual(msg);
  });

  it("rejects frames that are not JSON objects", () => {
    expect(parseServerMessage("{nope")).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
    expect(parseServerMessage('"QueryState"')).toBeNull();
    expect(parseServerMessage("[1,2]")).toBeNull();
  });

  it("rejects unknown types and missing session ids", () => {
    expect(roundTrip({ ...queryState(), type: "Query" })).toBeNull();
    expect(roundTrip({ ...queryState(), session_id: null })).toBeNull();
    expect(roundTrip({ ...sessionStarted(), session_id: 7 })).toBeNull();
  });

  it("rejects payloads with missing or mistyped fields", () => {
    const q = queryState();
    const { position: _dropped, ...rest } = q.payload;
    expect(roundTrip({ ...q, payload: rest })).toBeNull();
    expect(
      roundTrip(queryState({ position: [1, 2, 3] as unknown as [number, number] })),
    ).toBeNull();
    expect(
      roundTrip(queryState({ effort_used: -1 })),
    ).toBeNull();
    expect(
      roundTrip(queryState({ phase: "P6" as never })),
    ).toBeNull();
    expect(
      roundTrip(sessionStarted({ embodiment: "RealArm" as never })),
    ).toBeNull();
    expect(
      roundTrip(sessionStarted({ status: "Paused" as never })),
    ).toBeNull();
    expect(roundTrip(errorMessage("out-of-cheese" as never))).toBeNull();
    expect(roundTrip({ type: "QueryState", session_id: "s", payload: 3 })).toBeNull();
  });

  it("rejects malformed guidance", () => {
    expect(roundTrip(guidance({ per_state: [] }))).toBeNull();
    const g = guidance();
    g.payload.per_state[0]!.residual_norm = -0.1;
    expect(roundTrip(g)).toBeNull();
    expect(roundTrip(guidance({ episode_R2: -1 }))).toBeNull();
  });

  it("rejects malformed trajectories", () => {
    const r = replay();
    r.payload.trajectory.velocities = r.payload.trajectory.velocities.slice(1);
    expect(roundTrip(r)).toBeNull();
    const empty = replay();
    empty.payload.trajectory.positions = [];
    empty.payload.trajectory.velocities = [];
    empty.payload.trajectory.actions = [];
    expect(roundTrip(empty)).toBeNull();
    expect(roundTrip(replay({ trajectory: { ...replay().payload.trajectory, dt: 0 } }))).toBeNull();
  });

  it("rejects non-finite numbers", () => {
    expect(isVec2([0, NaN])).toBe(false);
    expect(isVec2([Infinity, 0])).toBe(false);
    expect(isVec2([0, 1])).toBe(true);
    expect(isVec2([0])).toBe(false);
    const q = queryState();
    (q.payload as { position: unknown }).position = [0, NaN];
    expect(isServerMessage(q)).toBe(false);
  });
});

describe("client message builders", () => {
  it("build the documented envelopes", () => {
    expect(startSession("SimArm", 7)).toEqual({
      type: "StartSession",
      session_id: null,
      payload: { embodiment: "SimArm", seed: 7 },
    });
    expect(startSession()).toEqual({
      type: "StartSession",
      session_id: null,
      payload: {},
    });
    expect(submitAction("s-1", [0.5, -1])).toEqual({
      type: "SubmitAction",
      session_id: "s-1",
      payload: { u: [0.5, -1] },
    });
    expect(acknowledgeReplay("s-1")).toEqual({
      type: "AcknowledgeReplay",
      session_id: "s-1",
      payload: {},
    });
    expect(resume("s-1")).toEqual({
      type: "Resume",
      session_id: null,
      payload: { session_id: "s-1" },
    });
  });
});
