"""The five-phase experiment state machine.

A session walks a teacher through five phases: P1 (skill 1, one episode),
P2 (skill 2, one), P3 (skill 1, eight episodes, guidance for the Target
group), P4 (skill 1, one; retention) and P5 (skill 2, one; transfer). Each
episode asks for one demonstration per query state, fits the learner on
exactly that episode's demonstrations, rolls out the learnt policy for
replay feedback, and records the parameter error against the target.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dynamics import ArmModel, KinematicModel, Trajectory, rollout
from .errors import InvalidInputError, ProtocolOrderError, UnknownSkillError
from .guidance import GuidanceFrame, build_guidance
from .learner import DemonstrationSet, LearnerConfig, fit, teaching_risk
from .queries import QueryBatch, feature_matrix, generate_query_states, phase_seed
from .skills import (
    KINEMATIC_ACTION_CAP,
    SIM_ACTION_CAP,
    Skill,
    SkillParameters,
    TaskSpaceState,
    clip_action,
    get_skill,
)

GROUPS = ("Target", "Control")
EMBODIMENTS = ("SimArm", "KinematicArm")

# (phase name, phase number, skill slot, episode count)
PHASE_PLAN = (
    ("P1", 1, 1, 1),
    ("P2", 2, 2, 1),
    ("P3", 3, 1, 8),
    ("P4", 4, 1, 1),
    ("P5", 5, 2, 1),
)
EPISODES_PER_SESSION = sum(n for _, _, _, n in PHASE_PLAN)

# Per-embodiment wiring: default skills, demonstration cap (newtons / cm),
# and the typical optimal-action magnitude used to scale teacher noise.
EMBODIMENT_INFO = {
    "SimArm": {
        "skills": ("sim-s1", "sim-s2"),
        "action_cap": SIM_ACTION_CAP,
        "action_scale": 2.0,
        "replay_start": TaskSpaceState(np.array([0.0, 1.5])),
    },
    "KinematicArm": {
        "skills": ("phys-s1", "phys-s2"),
        "action_cap": KINEMATIC_ACTION_CAP,
        "action_scale": 5.0,
        "replay_start": TaskSpaceState(np.array([10.0, -5.0])),
    },
}


@dataclass(frozen=True)
class SessionConfig:
    group: str
    embodiment: str
    seed: int
    lam: float = LearnerConfig().lam
    kappa_max: float = 100.0
    skill1_id: str = ""
    skill2_id: str = ""

    def __post_init__(self):
        if self.group not in GROUPS:
            raise InvalidInputError(f"group must be one of {GROUPS}")
        if self.embodiment not in EMBODIMENTS:
            raise InvalidInputError(f"embodiment must be one of {EMBODIMENTS}")
        defaults = EMBODIMENT_INFO[self.embodiment]["skills"]
        if not self.skill1_id:
            object.__setattr__(self, "skill1_id", defaults[0])
        if not self.skill2_id:
            object.__setattr__(self, "skill2_id", defaults[1])


@dataclass(frozen=True)
class EpisodeRecord:
    phase: str
    episode_index: int
    skill_id: str
    batch: QueryBatch
    actions: tuple[np.ndarray, ...]
    learnt: SkillParameters
    error_e: float
    replay: Trajectory
    guidance_shown: bool
    started_at: float
    finished_at: float


class SessionState:
    """Mutable run state of one session; transitions are serialized per session."""

    def __init__(self, config: SessionConfig, skills: tuple[Skill, Skill], model):
        self.config = config
        self.skills = skills
        self.model = model
        self.phase_idx = 0
        self.episode_index = 1
        self.records: list[EpisodeRecord] = []
        self.status = "AwaitingAction"
        self.submitted: list[np.ndarray] = []
        self._episode_started_at = time.time()
        self.current_batch = self._make_batch()

    # -- plan helpers ------------------------------------------------------

    @property
    def phase(self) -> str:
        return PHASE_PLAN[self.phase_idx][0] if self.phase_idx < len(PHASE_PLAN) else "P5"

    @property
    def phase_number(self) -> int:
        return PHASE_PLAN[min(self.phase_idx, len(PHASE_PLAN) - 1)][1]

    @property
    def current_skill(self) -> Skill:
        slot = PHASE_PLAN[min(self.phase_idx, len(PHASE_PLAN) - 1)][2]
        return self.skills[slot - 1]

    @property
    def demo_index(self) -> int:
        return len(self.submitted)

    @property
    def effort_budget(self) -> int:
        return self.current_skill.feature_map.dim

    @property
    def guidance_active(self) -> bool:
        return self.config.group == "Target" and self.phase == "P3"

    def _make_batch(self) -> QueryBatch:
        seed = phase_seed(self.config.seed, self.phase_number, self.episode_index)
        return generate_query_states(self.current_skill, seed, self.config.kappa_max)


def begin_session(cfg: SessionConfig) -> SessionState:
    """Start a session at P1 episode 1 with a fresh query batch."""
    skill1 = get_skill(cfg.skill1_id)
    skill2 = get_skill(cfg.skill2_id)
    expected_dim = 5 if cfg.embodiment == "SimArm" else 3
    for sk in (skill1, skill2):
        if sk.feature_map.dim != expected_dim:
            raise UnknownSkillError(
                f"skill {sk.id} does not fit embodiment {cfg.embodiment}")
    model = ArmModel() if cfg.embodiment == "SimArm" else KinematicModel()
    return SessionState(cfg, (skill1, skill2), model)


def submit_demonstration(state: SessionState, u) -> tuple[SessionState, GuidanceFrame | None]:
    """Record one action; on the last one, learn, roll out, and store the episode.

    Accepted while awaiting an action or while guidance from the previous
    submission is on screen (a new submission dismisses it). Returns the
    guidance frame for Target-group P3 episodes, else None.
    """
    if state.status not in ("AwaitingAction", "ShowingGuidance"):
        raise ProtocolOrderError(f"cannot submit while {state.status}")
    u = np.asarray(u, dtype=float)
    if u.shape != (2,) or not np.isfinite(u).all():
        raise InvalidInputError("action must be a finite 2-vector")
    cap = EMBODIMENT_INFO[state.config.embodiment]["action_cap"]
    state.submitted.append(clip_action(u, cap))

    guidance = None
    if state.guidance_active:
        guidance = build_guidance(state.current_skill, state.current_batch,
                                  state.submitted)

    if len(state.submitted) == state.effort_budget:
        _finish_episode(state)
    else:
        state.status = "ShowingGuidance" if guidance is not None else "AwaitingAction"
    return state, guidance


def _finish_episode(state: SessionState) -> None:
    skill = state.current_skill
    demos = DemonstrationSet(features=feature_matrix(state.current_batch),
                             actions=np.vstack(state.submitted),
                             skill_id=skill.id)
    learnt = fit(demos, LearnerConfig(state.config.lam))
    error_e = teaching_risk(learnt, skill.target)
    info = EMBODIMENT_INFO[state.config.embodiment]
    replay = rollout(state.model, learnt, skill.feature_map, info["replay_start"])
    state.records.append(EpisodeRecord(
        phase=state.phase, episode_index=state.episode_index, skill_id=skill.id,
        batch=state.current_batch, actions=tuple(state.submitted), learnt=learnt,
        error_e=error_e, replay=replay, guidance_shown=state.guidance_active,
        started_at=state._episode_started_at, finished_at=time.time()))
    state.status = "ShowingReplay"


def acknowledge_replay(state: SessionState) -> SessionState:
    """Advance past replay feedback to the next episode, phase, or the end."""
    if state.status != "ShowingReplay":
        raise ProtocolOrderError(f"cannot acknowledge replay while {state.status}")
    phase_episodes = PHASE_PLAN[state.phase_idx][3]
    if state.episode_index < phase_episodes:
        state.episode_index += 1
    else:
        state.phase_idx += 1
        state.episode_index = 1
        if state.phase_idx == len(PHASE_PLAN):
            state.status = "Finished"
            state.current_batch = None
            state.submitted = []
            return state
    state.submitted = []
    state._episode_started_at = time.time()
    state.current_batch = state._make_batch()
    state.status = "AwaitingAction"
    return state


def session_summary(state: SessionState) -> list[tuple[str, int, float]]:
    """Ordered (phase, episode, error) rows for every completed episode."""
    return [(r.phase, r.episode_index, r.error_e) for r in state.records]
