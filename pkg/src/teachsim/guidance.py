"""Post-demonstration guidance: optimal-versus-provided arrows and progress.

A guidance frame pairs every submitted action with the target controller's
action at the same query state. The per-record residual norms and their
stacked Frobenius norm are exactly the action-residual factor of the
teaching-risk bound, so what the teacher sees is the quantity the bound
says matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .learner import risk_factor_R2
from .queries import QueryBatch
from .skills import Skill, TaskSpaceState, optimal_action


@dataclass(frozen=True)
class GuidanceRecord:
    state: TaskSpaceState
    user_action: np.ndarray
    optimal_action: np.ndarray
    residual_norm: float


@dataclass(frozen=True)
class GuidanceFrame:
    per_state: tuple[GuidanceRecord, ...]
    episode_R2: float
    effort_used: int
    effort_budget: int

    def __post_init__(self):
        if not 0 <= self.effort_used <= self.effort_budget:
            raise InvalidInputError("effort counters out of range")


def build_guidance(skill: Skill, batch: QueryBatch,
                   submitted: list[np.ndarray]) -> GuidanceFrame:
    """Pair each submitted action with the optimal action at its query state."""
    if len(submitted) > len(batch):
        raise InvalidInputError(
            f"{len(submitted)} submissions exceed the batch of {len(batch)}")
    records = []
    for state, user_u in zip(batch.states, submitted):
        user_u = np.asarray(user_u, dtype=float)
        opt_u = optimal_action(skill, state)
        records.append(GuidanceRecord(
            state=state, user_action=user_u, optimal_action=opt_u,
            residual_norm=float(np.linalg.norm(user_u - opt_u))))
    if records:
        users = np.vstack([r.user_action for r in records])
        opts = np.vstack([r.optimal_action for r in records])
        episode_r2 = risk_factor_R2(users, opts)
    else:
        episode_r2 = 0.0
    return GuidanceFrame(per_state=tuple(records), episode_R2=episode_r2,
                         effort_used=len(records), effort_budget=len(batch))
