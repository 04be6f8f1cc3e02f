/** Hand-built server message samples for unit tests. Shapes mirror what the
 * session server emits; tests mutate copies to probe the validators. */

import type {
  GuidanceMessage,
  GuidancePayload,
  PhaseChangedMessage,
  QueryStateMessage,
  QueryStatePayload,
  ReplayMessage,
  ReplayPayload,
  ErrorMessage,
  SessionFinishedMessage,
  SessionStartedMessage,
  SessionStartedPayload,
} from "../src/protocol";

export const SID = "session-0000-7";

export function sessionStarted(
  over: Partial<SessionStartedPayload> = {},
): SessionStartedMessage {
  return {
    type: "SessionStarted",
    session_id: SID,
    payload: {
      embodiment: "SimArm",
      workspace: [
        [-2, 0],
        [2, 2],
      ],
      action_cap: 20,
      effort_budget: 5,
      total_episodes: 12,
      episodes_done: 0,
      phase: "P1",
      episode_index: 0,
      status: "AwaitingAction",
      ...over,
    },
  };
}

export function queryState(
  over: Partial<QueryStatePayload> = {},
): QueryStateMessage {
  return {
    type: "QueryState",
    session_id: SID,
    payload: {
      index: 0,
      position: [0.25, 1.1],
      velocity: [0.05, -0.02],
      effort_used: 0,
      effort_budget: 5,
      phase: "P1",
      episode_index: 0,
      episodes_done: 0,
      total_episodes: 12,
      ...over,
    },
  };
}

export function guidance(over: Partial<GuidancePayload> = {}): GuidanceMessage {
  return {
    type: "Guidance",
    session_id: SID,
    payload: {
      per_state: [
        {
          position: [0.25, 1.1],
          velocity: [0.05, -0.02],
          user_action: [1.5, 0.5],
          optimal_action: [1.1, 0.2],
          residual_norm: 0.5,
        },
      ],
      episode_R2: 0.5,
      effort_used: 1,
      effort_budget: 5,
      ...over,
    },
  };
}

export function replay(over: Partial<ReplayPayload> = {}): ReplayMessage {
  return {
    type: "Replay",
    session_id: SID,
    payload: {
      phase: "P1",
      episode_index: 0,
      trajectory: {
        dt: 0.02,
        sim_dt: 0.02,
        positions: [
          [0, 1],
          [0.01, 1.02],
          [0.02, 1.05],
        ],
        velocities: [
          [0, 0],
          [0.5, 1],
          [0.5, 1.5],
        ],
        actions: [
          [1, 2],
          [1, 2],
          [0, 0],
        ],
      },
      episodes_done: 1,
      total_episodes: 12,
      ...over,
    },
  };
}

export function phaseChanged(
  phase: PhaseChangedMessage["payload"]["phase"] = "P2",
): PhaseChangedMessage {
  return {
    type: "PhaseChanged",
    session_id: SID,
    payload: { phase, episode_index: 0, skill_name: "Line following (sim)" },
  };
}

export function sessionFinished(): SessionFinishedMessage {
  return {
    type: "SessionFinished",
    session_id: SID,
    payload: { episodes_done: 12, total_episodes: 12 },
  };
}

export function errorMessage(
  code: ErrorMessage["payload"]["code"] = "protocol-order",
): ErrorMessage {
  return {
    type: "Error",
    session_id: SID,
    payload: { code, message: "cannot do that now" },
  };
}
