/** Client-side session view state.
 *
 * A SessionView is a pure reducer over server messages applied in arrival
 * order. It holds exactly what the screen shows and nothing the server did
 * not say: no learner, no guidance computation, no skill parameters, and no
 * group assignment (the group is unobservable except through the presence of
 * Guidance messages). Progress numbers always come verbatim from the latest
 * server message.
 *
 * Sequencing: the server sends the replies to one request back-to-back, e.g.
 * `[Guidance, QueryState]` or `[Guidance, Replay]`. While a guidance panel
 * is up, the follow-up view is parked in `pendingQuery` / `pendingReplay`
 * and promoted by `ackGuidance` (a local click; the wire has no guidance
 * acknowledgement), so exactly one query state is visible at a time and the
 * next appears only after the guidance is dismissed. Resume resends only
 * `SessionStarted` plus the pending view, so a resumed view equals the live
 * view after its guidance panel was dismissed.
 */

import type {
  Embodiment,
  GuidancePayload,
  Phase,
  QueryStatePayload,
  ReplayPayload,
  ServerMessage,
  SessionStatus,
  Vec2,
} from "./protocol";

export interface ProgressState {
  effortUsed: number;
  effortBudget: number;
  episodesDone: number;
  totalEpisodes: number;
}

export interface SessionView {
  sessionId: string | null;
  embodiment: Embodiment | null;
  workspace: [Vec2, Vec2] | null;
  actionCap: number | null;
  status: SessionStatus | null;
  phase: Phase | null;
  episodeIndex: number | null;
  /** Banner text derived from phase and episode only, so a resumed session
   * renders the same banner as a live one. */
  banner: string;
  /** The one query state on screen, or null outside demonstrations. */
  query: QueryStatePayload | null;
  /** Guidance for the demonstration just given; non-null only when the
   * server sent a Guidance message that is still on screen. */
  guidance: GuidancePayload | null;
  /** Replay awaiting acknowledgement, or null. */
  replay: ReplayPayload | null;
  /** Views parked behind an open guidance panel. */
  pendingQuery: QueryStatePayload | null;
  pendingReplay: ReplayPayload | null;
  /** Transient phase announcement (skill name is only ever sent here, so it
   * cannot survive a resume; rendered as a toast, excluded from snapshot). */
  phaseNotice: { phase: Phase; skillName: string } | null;
  progress: ProgressState;
  finished: boolean;
  /** Last server-reported error, cleared by the next non-error message. */
  lastError: { code: string; message: string } | null;
}

export function emptyView(): SessionView {
  return {
    sessionId: null,
    embodiment: null,
    workspace: null,
    actionCap: null,
    status: null,
    phase: null,
    episodeIndex: null,
    banner: "connecting",
    query: null,
    guidance: null,
    replay: null,
    pendingQuery: null,
    pendingReplay: null,
    phaseNotice: null,
    progress: {
      effortUsed: 0,
      effortBudget: 0,
      episodesDone: 0,
      totalEpisodes: 0,
    },
    finished: false,
    lastError: null,
  };
}

function bannerText(phase: Phase, episodeIndex: number): string {
  return `${phase} · episode ${episodeIndex}`;
}

function showQuery(view: SessionView, p: QueryStatePayload): void {
  view.query = p;
  view.pendingQuery = null;
  view.guidance = null;
  view.replay = null;
  view.status = "AwaitingAction";
  view.phase = p.phase;
  view.episodeIndex = p.episode_index;
  view.banner = bannerText(p.phase, p.episode_index);
  view.progress.effortUsed = p.effort_used;
  view.progress.effortBudget = p.effort_budget;
  view.progress.episodesDone = p.episodes_done;
  view.progress.totalEpisodes = p.total_episodes;
}

function showReplay(view: SessionView, p: ReplayPayload): void {
  view.replay = p;
  view.pendingReplay = null;
  view.query = null;
  view.guidance = null;
  view.status = "ShowingReplay";
  view.phase = p.phase;
  view.episodeIndex = p.episode_index;
  view.banner = bannerText(p.phase, p.episode_index);
  // demonstrations for this episode are complete; the bar tracks pending
  // demonstrations, and the next QueryState will report effort_used 0
  // (Replay carries no effort fields, so this keeps a resumed view equal)
  view.progress.effortUsed = 0;
  view.progress.episodesDone = p.episodes_done;
  view.progress.totalEpisodes = p.total_episodes;
}

/** Apply one validated server message; returns the same (mutated) view. */
export function applyMessage(view: SessionView, msg: ServerMessage): SessionView {
  if (msg.type !== "Error") view.lastError = null;

  switch (msg.type) {
    case "SessionStarted": {
      const p = msg.payload;
      view.sessionId = msg.session_id;
      view.embodiment = p.embodiment;
      view.workspace = p.workspace;
      view.actionCap = p.action_cap;
      view.status = p.status;
      view.phase = p.phase;
      view.episodeIndex = p.episode_index;
      view.banner = bannerText(p.phase, p.episode_index);
      view.progress.effortBudget = p.effort_budget;
      view.progress.episodesDone = p.episodes_done;
      view.progress.totalEpisodes = p.total_episodes;
      view.finished = p.status === "Finished";
      // fresh start or resume: the pending view follows, drop anything stale
      view.query = null;
      view.guidance = null;
      view.replay = null;
      view.pendingQuery = null;
      view.pendingReplay = null;
      view.phaseNotice = null;
      break;
    }
    case "QueryState": {
      if (view.guidance !== null) {
        // parked until the guidance panel is dismissed
        view.pendingQuery = msg.payload;
        view.progress.effortUsed = msg.payload.effort_used;
        view.progress.effortBudget = msg.payload.effort_budget;
        view.progress.episodesDone = msg.payload.episodes_done;
        view.progress.totalEpisodes = msg.payload.total_episodes;
      } else {
        showQuery(view, msg.payload);
      }
      break;
    }
    case "Guidance": {
      const p = msg.payload;
      view.guidance = p;
      view.status = "ShowingGuidance";
      view.progress.effortUsed = p.effort_used;
      view.progress.effortBudget = p.effort_budget;
      break;
    }
    case "Replay": {
      if (view.guidance !== null) {
        view.pendingReplay = msg.payload;
        view.progress.episodesDone = msg.payload.episodes_done;
        view.progress.totalEpisodes = msg.payload.total_episodes;
      } else {
        showReplay(view, msg.payload);
      }
      break;
    }
    case "PhaseChanged": {
      const p = msg.payload;
      view.phase = p.phase;
      view.episodeIndex = p.episode_index;
      view.banner = bannerText(p.phase, p.episode_index);
      view.phaseNotice = { phase: p.phase, skillName: p.skill_name };
      break;
    }
    case "SessionFinished": {
      view.finished = true;
      view.status = "Finished";
      view.query = null;
      view.guidance = null;
      view.replay = null;
      view.pendingQuery = null;
      view.pendingReplay = null;
      view.banner = "session complete";
      view.progress.effortUsed = 0;
      view.progress.episodesDone = msg.payload.episodes_done;
      view.progress.totalEpisodes = msg.payload.total_episodes;
      break;
    }
    case "Error": {
      view.lastError = {
        code: msg.payload.code,
        message: msg.payload.message,
      };
      break;
    }
  }
  return view;
}

/** Dismiss the guidance panel (local only; there is no wire message for
 * this) and promote whatever view was parked behind it. */
export function ackGuidance(view: SessionView): SessionView {
  if (view.guidance === null) return view;
  view.guidance = null;
  if (view.pendingReplay !== null) {
    showReplay(view, view.pendingReplay);
  } else if (view.pendingQuery !== null) {
    showQuery(view, view.pendingQuery);
  } else {
    view.status = "AwaitingAction";
  }
  return view;
}

/** Whether a drag gesture may produce a SubmitAction right now. The wire
 * also accepts submissions while guidance is showing, but the UI requires
 * dismissing the panel first so states appear strictly one after another. */
export function canSubmit(view: SessionView): boolean {
  return (
    view.status === "AwaitingAction" && view.query !== null && !view.finished
  );
}

/** Progress bar fill in [0, 1], straight from the latest server counters. */
export function effortFill(view: SessionView): number {
  const { effortUsed, effortBudget } = view.progress;
  return effortBudget > 0 ? effortUsed / effortBudget : 0;
}

/** Session-level progress in [0, 1] for the episode counter. */
export function episodeFill(view: SessionView): number {
  const { episodesDone, totalEpisodes } = view.progress;
  return totalEpisodes > 0 ? episodesDone / totalEpisodes : 0;
}

/** JSON-comparable snapshot of everything the screen renders persistently.
 * Two views that snapshot equal render identically (transient toasts
 * excluded); used to check that Resume restores the same view. */
export function snapshot(view: SessionView): unknown {
  return JSON.parse(
    JSON.stringify({
      embodiment: view.embodiment,
      workspace: view.workspace,
      actionCap: view.actionCap,
      status: view.status,
      phase: view.phase,
      episodeIndex: view.episodeIndex,
      banner: view.banner,
      query: view.query,
      guidance: view.guidance,
      replay: view.replay,
      pendingQuery: view.pendingQuery,
      pendingReplay: view.pendingReplay,
      progress: view.progress,
      finished: view.finished,
    }),
  );
}
