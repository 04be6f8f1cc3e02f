"""Parameterized synthetic teachers for desk-scale group experiments.

A synthetic novice distorts the optimal action multiplicatively: it scales
it by an overshoot gain, rotates it by an angular bias, and adds Gaussian
noise. Guidance uptake moves the gain toward 1 and shrinks the bias and the
noise. Because the distortion acts on whatever the optimal action is, an
improvement learned on one skill carries to any other skill structurally,
which is what the retention and transfer phases measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError
from .guidance import GuidanceFrame
from .protocol import (
    EMBODIMENT_INFO,
    SessionConfig,
    SessionState,
    acknowledge_replay,
    begin_session,
    submit_demonstration,
)
from .skills import Skill, TaskSpaceState, optimal_action

GAIN_RANGE = (1.5, 3.0)
BIAS_RANGE = (-0.5, 0.5)
NOISE_SIGMA_FACTOR = 0.15
DEFAULT_ADAPT_RATE = 0.35

# Seeds of distinct subjects are spaced far enough apart that the per-episode
# sub-seed windows of different sessions can never overlap.
SUBJECT_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class TeacherModel:
    """A teacher's current distortion of the optimal action."""

    gain_scale: float
    angular_bias: float
    noise_sigma: float
    adapt_rate: float
    rng_seed: int
    rng: np.random.Generator

    def __post_init__(self):
        if self.gain_scale <= 0:
            raise InvalidInputError("gain_scale must be positive")
        if not 0.0 <= self.adapt_rate <= 1.0:
            raise InvalidInputError("adapt_rate must lie in [0, 1]")


def novice_teacher(seed: int, action_scale: float,
                   adapt_rate: float = DEFAULT_ADAPT_RATE,
                   gain_range: tuple[float, float] = GAIN_RANGE,
                   bias_range: tuple[float, float] = BIAS_RANGE,
                   noise_sigma_factor: float = NOISE_SIGMA_FACTOR) -> TeacherModel:
    """Draw a fresh novice: large gain, nonzero bias, noise set by action scale."""
    rng = np.random.default_rng(seed)
    return TeacherModel(
        gain_scale=float(rng.uniform(*gain_range)),
        angular_bias=float(rng.uniform(*bias_range)),
        noise_sigma=noise_sigma_factor * action_scale,
        adapt_rate=adapt_rate,
        rng_seed=seed,
        rng=rng,
    )


def oracle_teacher(seed: int = 0) -> TeacherModel:
    """A perfect teacher: returns the optimal action exactly."""
    return TeacherModel(gain_scale=1.0, angular_bias=0.0, noise_sigma=0.0,
                        adapt_rate=DEFAULT_ADAPT_RATE, rng_seed=seed,
                        rng=np.random.default_rng(seed))


def teacher_act(t: TeacherModel, skill: Skill, state: TaskSpaceState) -> np.ndarray:
    """u = gain * Rot(bias) @ u*(state) + Gaussian noise."""
    ustar = optimal_action(skill, state)
    c, s = math.cos(t.angular_bias), math.sin(t.angular_bias)
    rot = np.array([[c, -s], [s, c]])
    u = t.gain_scale * (rot @ ustar)
    if t.noise_sigma > 0:
        u = u + t.rng.normal(0.0, t.noise_sigma, size=2)
    return u


def teacher_update(t: TeacherModel, frame: GuidanceFrame) -> TeacherModel:
    """Guidance uptake: gain toward 1, bias and noise shrink geometrically."""
    a = t.adapt_rate
    return replace(
        t,
        gain_scale=t.gain_scale + a * (1.0 - t.gain_scale),
        angular_bias=(1.0 - a) * t.angular_bias,
        noise_sigma=(1.0 - a / 2.0) * t.noise_sigma,
    )


@dataclass(frozen=True)
class SessionResult:
    subject_id: str
    config: SessionConfig
    state: SessionState
    teacher: TeacherModel


def run_session(cfg: SessionConfig, teacher: TeacherModel,
                subject_id: str = "s0") -> SessionResult:
    """Drive one full session with a synthetic teacher.

    The teacher adapts once per episode, from the guidance frame shown after
    that episode's final demonstration; control-group sessions never produce
    guidance, so their teachers never change.
    """
    state = begin_session(cfg)
    while state.status != "Finished":
        last_frame = None
        while state.status in ("AwaitingAction", "ShowingGuidance"):
            query_state = state.current_batch.states[state.demo_index]
            u = teacher_act(teacher, state.current_skill, query_state)
            state, frame = submit_demonstration(state, u)
            if frame is not None:
                last_frame = frame
        if last_frame is not None:
            teacher = teacher_update(teacher, last_frame)
        state = acknowledge_replay(state)
    return SessionResult(subject_id=subject_id, config=cfg, state=state,
                         teacher=teacher)


def run_group(n: int, group: str, embodiment: str, master_seed: int,
              lam: float | None = None, kappa_max: float | None = None,
              adapt_rate: float = DEFAULT_ADAPT_RATE,
              gain_range: tuple[float, float] = GAIN_RANGE,
              bias_range: tuple[float, float] = BIAS_RANGE,
              noise_sigma_factor: float = NOISE_SIGMA_FACTOR) -> list[SessionResult]:
    """Run n independent synthetic sessions of one group; deterministic."""
    if n < 1:
        raise InvalidInputError("group size must be at least 1")
    action_scale = EMBODIMENT_INFO[embodiment]["action_scale"]
    results = []
    for i in range(n):
        session_seed = master_seed + i * SUBJECT_SEED_STRIDE
        kwargs = {}
        if lam is not None:
            kwargs["lam"] = lam
        if kappa_max is not None:
            kwargs["kappa_max"] = kappa_max
        cfg = SessionConfig(group=group, embodiment=embodiment,
                            seed=session_seed, **kwargs)
        teacher = novice_teacher(session_seed, action_scale, adapt_rate,
                                 gain_range, bias_range, noise_sigma_factor)
        results.append(run_session(cfg, teacher, subject_id=f"{group.lower()}-{i:03d}"))
    return results
