/** Wire message vocabulary spoken with the session server.
 *
 * Every message in either direction is one JSON object
 * `{type, session_id, payload}`. The shapes here mirror the repo's
 * machine-readable schema (docs/protocol_schema.json); the guards validate
 * inbound messages field by field so a malformed frame can never reach the
 * view layer.
 */

export type Vec2 = [number, number];

export type Embodiment = "SimArm" | "KinematicArm";
export type Phase = "P1" | "P2" | "P3" | "P4" | "P5";
export type SessionStatus =
  | "AwaitingAction"
  | "ShowingGuidance"
  | "ShowingReplay"
  | "Finished";
export type ErrorCode =
  | "invalid-input"
  | "protocol-order"
  | "unknown-session"
  | "malformed"
  | "internal";

export interface SessionStartedPayload {
  embodiment: Embodiment;
  workspace: [Vec2, Vec2]; // [[x_min, y_min], [x_max, y_max]]
  action_cap: number;
  effort_budget: number;
  total_episodes: number;
  episodes_done: number;
  phase: Phase;
  episode_index: number;
  status: SessionStatus;
}

export interface QueryStatePayload {
  index: number;
  position: Vec2;
  velocity: Vec2;
  effort_used: number;
  effort_budget: number;
  phase: Phase;
  episode_index: number;
  episodes_done: number;
  total_episodes: number;
}

export interface GuidanceRecord {
  position: Vec2;
  velocity: Vec2;
  user_action: Vec2;
  optimal_action: Vec2;
  residual_norm: number;
}

export interface GuidancePayload {
  per_state: GuidanceRecord[];
  episode_R2: number;
  effort_used: number;
  effort_budget: number;
}

export interface TrajectoryPayload {
  dt: number; // seconds between stored samples
  sim_dt: number; // integration step behind the samples
  positions: Vec2[];
  velocities: Vec2[];
  actions: Vec2[];
}

export interface ReplayPayload {
  phase: Phase;
  episode_index: number;
  trajectory: TrajectoryPayload;
  episodes_done: number;
  total_episodes: number;
}

export interface PhaseChangedPayload {
  phase: Phase;
  episode_index: number;
  skill_name: string;
}

export interface SessionFinishedPayload {
  episodes_done: number;
  total_episodes: number;
}

export interface ErrorPayload {
  code: ErrorCode;
  message: string;
}

export interface SessionStartedMessage {
  type: "SessionStarted";
  session_id: string;
  payload: SessionStartedPayload;
}
export interface QueryStateMessage {
  type: "QueryState";
  session_id: string;
  payload: QueryStatePayload;
}
export interface GuidanceMessage {
  type: "Guidance";
  session_id: string;
  payload: GuidancePayload;
}
export interface ReplayMessage {
  type: "Replay";
  session_id: string;
  payload: ReplayPayload;
}
export interface PhaseChangedMessage {
  type: "PhaseChanged";
  session_id: string;
  payload: PhaseChangedPayload;
}
export interface SessionFinishedMessage {
  type: "SessionFinished";
  session_id: string;
  payload: SessionFinishedPayload;
}
export interface ErrorMessage {
  type: "Error";
  session_id: string | null;
  payload: ErrorPayload;
}

export type ServerMessage =
  | SessionStartedMessage
  | QueryStateMessage
  | GuidanceMessage
  | ReplayMessage
  | PhaseChangedMessage
  | SessionFinishedMessage
  | ErrorMessage;

export interface StartSessionMessage {
  type: "StartSession";
  session_id: null;
  payload: { embodiment?: Embodiment; seed?: number };
}
export interface SubmitActionMessage {
  type: "SubmitAction";
  session_id: string | null;
  payload: { u: Vec2 };
}
export interface AcknowledgeReplayMessage {
  type: "AcknowledgeReplay";
  session_id: string | null;
  payload: Record<string, never>;
}
export interface ResumeMessage {
  type: "Resume";
  session_id: string | null;
  payload: { session_id: string };
}

export type ClientMessage =
  | StartSessionMessage
  | SubmitActionMessage
  | AcknowledgeReplayMessage
  | ResumeMessage;

const EMBODIMENTS: readonly string[] = ["SimArm", "KinematicArm"];
const PHASES: readonly string[] = ["P1", "P2", "P3", "P4", "P5"];
const STATUSES: readonly string[] = [
  "AwaitingAction",
  "ShowingGuidance",
  "ShowingReplay",
  "Finished",
];
const ERROR_CODES: readonly string[] = [
  "invalid-input",
  "protocol-order",
  "unknown-session",
  "malformed",
  "internal",
];

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isCount(v: unknown): v is number {
  return isFiniteNumber(v) && Number.isInteger(v) && v >= 0;
}

export function isVec2(v: unknown): v is Vec2 {
  return (
    Array.isArray(v) &&
    v.length === 2 &&
    isFiniteNumber(v[0]) &&
    isFiniteNumber(v[1])
  );
}

function isVec2List(v: unknown): v is Vec2[] {
  return Array.isArray(v) && v.every(isVec2);
}

function isSessionStartedPayload(p: unknown): p is SessionStartedPayload {
  return (
    isObject(p) &&
    EMBODIMENTS.includes(p.embodiment as string) &&
    isVec2List(p.workspace) &&
    (p.workspace as Vec2[]).length === 2 &&
    isFiniteNumber(p.action_cap) &&
    p.action_cap > 0 &&
    isCount(p.effort_budget) &&
    isCount(p.total_episodes) &&
    isCount(p.episodes_done) &&
    PHASES.includes(p.phase as string) &&
    isCount(p.episode_index) &&
    STATUSES.includes(p.status as string)
  );
}

function isQueryStatePayload(p: unknown): p is QueryStatePayload {
  return (
    isObject(p) &&
    isCount(p.index) &&
    isVec2(p.position) &&
    isVec2(p.velocity) &&
    isCount(p.effort_used) &&
    isCount(p.effort_budget) &&
    PHASES.includes(p.phase as string) &&
    isCount(p.episode_index) &&
    isCount(p.episodes_done) &&
    isCount(p.total_episodes)
  );
}

function isGuidanceRecord(r: unknown): r is GuidanceRecord {
  return (
    isObject(r) &&
    isVec2(r.position) &&
    isVec2(r.velocity) &&
    isVec2(r.user_action) &&
    isVec2(r.optimal_action) &&
    isFiniteNumber(r.residual_norm) &&
    r.residual_norm >= 0
  );
}

function isGuidancePayload(p: unknown): p is GuidancePayload {
  return (
    isObject(p) &&
    Array.isArray(p.per_state) &&
    p.per_state.length >= 1 &&
    p.per_state.every(isGuidanceRecord) &&
    isFiniteNumber(p.episode_R2) &&
    p.episode_R2 >= 0 &&
    isCount(p.effort_used) &&
    isCount(p.effort_budget)
  );
}

function isTrajectoryPayload(t: unknown): t is TrajectoryPayload {
  if (
    !isObject(t) ||
    !isFiniteNumber(t.dt) ||
    t.dt <= 0 ||
    !isFiniteNumber(t.sim_dt) ||
    t.sim_dt <= 0 ||
    !isVec2List(t.positions) ||
    !isVec2List(t.velocities) ||
    !isVec2List(t.actions)
  ) {
    return false;
  }
  const n = (t.positions as Vec2[]).length;
  return (
    n >= 1 &&
    (t.velocities as Vec2[]).length === n &&
    (t.actions as Vec2[]).length === n
  );
}

function isReplayPayload(p: unknown): p is ReplayPayload {
  return (
    isObject(p) &&
    PHASES.includes(p.phase as string) &&
    isCount(p.episode_index) &&
    isTrajectoryPayload(p.trajectory) &&
    isCount(p.episodes_done) &&
    isCount(p.total_episodes)
  );
}

function isPhaseChangedPayload(p: unknown): p is PhaseChangedPayload {
  return (
    isObject(p) &&
    PHASES.includes(p.phase as string) &&
    isCount(p.episode_index) &&
    typeof p.skill_name === "string"
  );
}

function isSessionFinishedPayload(p: unknown): p is SessionFinishedPayload {
  return isObject(p) && isCount(p.episodes_done) && isCount(p.total_episodes);
}

function isErrorPayload(p: unknown): p is ErrorPayload {
  return (
    isObject(p) &&
    ERROR_CODES.includes(p.code as string) &&
    typeof p.message === "string"
  );
}

/** Validate an inbound server message; narrow to the typed union. */
export function isServerMessage(doc: unknown): doc is ServerMessage {
  if (!isObject(doc) || !isObject(doc.payload)) return false;
  const sid = doc.session_id;
  switch (doc.type) {
    case "SessionStarted":
      return typeof sid === "string" && isSessionStartedPayload(doc.payload);
    case "QueryState":
      return typeof sid === "string" && isQueryStatePayload(doc.payload);
    case "Guidance":
      return typeof sid === "string" && isGuidancePayload(doc.payload);
    case "Replay":
      return typeof sid === "string" && isReplayPayload(doc.payload);
    case "PhaseChanged":
      return typeof sid === "string" && isPhaseChangedPayload(doc.payload);
    case "SessionFinished":
      return typeof sid === "string" && isSessionFinishedPayload(doc.payload);
    case "Error":
      return (
        (typeof sid === "string" || sid === null) && isErrorPayload(doc.payload)
      );
    default:
      return false;
  }
}

/** Parse one wire frame; returns null for anything that fails validation. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  return isServerMessage(doc) ? doc : null;
}

export function startSession(
  embodiment?: Embodiment,
  seed?: number,
): StartSessionMessage {
  const payload: StartSessionMessage["payload"] = {};
  if (embodiment !== undefined) payload.embodiment = embodiment;
  if (seed !== undefined) payload.seed = seed;
  return { type: "StartSession", session_id: null, payload };
}

export function submitAction(
  sessionId: string | null,
  u: Vec2,
): SubmitActionMessage {
  return { type: "SubmitAction", session_id: sessionId, payload: { u } };
}

export function acknowledgeReplay(
  sessionId: string | null,
): AcknowledgeReplayMessage {
  return { type: "AcknowledgeReplay", session_id: sessionId, payload: {} };
}

export function resume(sessionId: string): ResumeMessage {
  return { type: "Resume", session_id: null, payload: { session_id: sessionId } };
}
