"""Wire message vocabulary spoken between the session server and clients.

Every message is one JSON object ``{"type", "session_id", "payload"}``.
Server to client: SessionStarted, QueryState, Guidance, Replay, PhaseChanged,
SessionFinished, Error. Client to server: StartSession, SubmitAction,
AcknowledgeReplay, Resume.

The client-visible session description never includes the group assignment;
the only observable group difference is whether Guidance messages arrive.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .errors import InvalidInputError
from .guidance import GuidanceFrame
from .protocol import EMBODIMENT_INFO, EPISODES_PER_SESSION, SessionState

SERVER_MESSAGE_TYPES = ("SessionStarted", "QueryState", "Guidance", "Replay",
                        "PhaseChanged", "SessionFinished", "Error")
CLIENT_MESSAGE_TYPES = ("StartSession", "SubmitAction", "AcknowledgeReplay",
                        "Resume")


def _message(mtype: str, session_id: str | None, payload: dict) -> dict:
    return {"type": mtype, "session_id": session_id, "payload": payload}


# -- Server-side builders ----------------------------------------------------

def session_started(session_id: str, state: SessionState) -> dict:
    info = EMBODIMENT_INFO[state.config.embodiment]
    skill = state.current_skill
    return _message("SessionStarted", session_id, {
        "embodiment": state.config.embodiment,
        "workspace": skill.workspace.corners,
        "action_cap": info["action_cap"],
        "effort_budget": state.effort_budget,
        "total_episodes": EPISODES_PER_SESSION,
        "episodes_done": len(state.records),
        "phase": state.phase,
        "episode_index": state.episode_index,
        "status": state.status,
    })


def query_state(session_id: str, state: SessionState) -> dict:
    s = state.current_batch.states[state.demo_index]
    return _message("QueryState", session_id, {
        "index": state.demo_index,
        "position": s.position.tolist(),
        "velocity": s.velocity.tolist(),
        "effort_used": state.demo_index,
        "effort_budget": state.effort_budget,
        "phase": state.phase,
        "episode_index": state.episode_index,
        "episodes_done": len(state.records),
        "total_episodes": EPISODES_PER_SESSION,
    })


def guidance(session_id: str, frame: GuidanceFrame) -> dict:
    return _message("Guidance", session_id, {
        "per_state": [{
            "position": r.state.position.tolist(),
            "velocity": r.state.velocity.tolist(),
            "user_action": r.user_action.tolist(),
            "optimal_action": r.optimal_action.tolist(),
            "residual_norm": r.residual_norm,
        } for r in frame.per_state],
        "episode_R2": frame.episode_R2,
        "effort_used": frame.effort_used,
        "effort_budget": frame.effort_budget,
    })


def replay(session_id: str, state: SessionState) -> dict:
    rec = state.records[-1]
    t = rec.replay
    return _message("Replay", session_id, {
        "phase": rec.phase,
        "episode_index": rec.episode_index,
        "trajectory": {
            "dt": t.dt,
            "sim_dt": t.sim_dt,
            "positions": t.positions.tolist(),
            "velocities": t.velocities.tolist(),
            "actions": t.actions.tolist(),
        },
        "episodes_done": len(state.records),
        "total_episodes": EPISODES_PER_SESSION,
    })


def phase_changed(session_id: str, state: SessionState) -> dict:
    return _message("PhaseChanged", session_id, {
        "phase": state.phase,
        "episode_index": state.episode_index,
        "skill_name": state.current_skill.name,
    })


def session_finished(session_id: str, state: SessionState) -> dict:
    return _message("SessionFinished", session_id, {
        "episodes_done": len(state.records),
        "total_episodes": EPISODES_PER_SESSION,
    })


def error(session_id: str | None, code: str, message: str) -> dict:
    return _message("Error", session_id, {"code": code, "message": message})


# -- Client-message validation ------------------------------------------------

def parse_client_message(doc: Any) -> tuple[str, str | None, dict]:
    """Validate an inbound message; raises InvalidInputError on any defect."""
    if not isinstance(doc, dict):
        raise InvalidInputError("message must be a JSON object")
    mtype = doc.get("type")
    if mtype not in CLIENT_MESSAGE_TYPES:
        raise InvalidInputError(f"unknown client message type {mtype!r}")
    session_id = doc.get("session_id")
    if session_id is not None and not isinstance(session_id, str):
        raise InvalidInputError("session_id must be a string or null")
    payload = doc.get("payload", {})
    if not isinstance(payload, dict):
        raise InvalidInputError("payload must be an object")

    if mtype == "StartSession":
        emb = payload.get("embodiment", "SimArm")
        if emb not in EMBODIMENT_INFO:
            raise InvalidInputError(f"unknown embodiment {emb!r}")
        seed = payload.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise InvalidInputError("seed must be an integer")
    elif mtype == "SubmitAction":
        u = payload.get("u")
        if (not isinstance(u, (list, tuple)) or len(u) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                           for v in u)
                or not np.all(np.isfinite(np.asarray(u, dtype=float)))):
            raise InvalidInputError("u must be a finite [ux, uy] pair")
    elif mtype == "Resume":
        if not isinstance(payload.get("session_id", session_id), str):
            raise InvalidInputError("Resume requires a session_id")
    return mtype, session_id, payload
