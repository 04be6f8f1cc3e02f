"""Pseudo-random selection of well-conditioned query states.

States are sampled uniformly from the skill's workspace and accepted one at a
time: a candidate stays only if the partial feature matrix keeps a healthy
smallest singular value, and the finished batch must satisfy the final
condition-number bound. Everything is deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationExhaustedError, InvalidInputError
from .skills import FeatureMap, Skill, TaskSpaceState, eval_features

DEFAULT_KAPPA_MAX = 100.0
MAX_ATTEMPTS_PER_ROW = 10_000
MAX_BATCH_RESTARTS = 10

# Acceptance threshold for the smallest singular value, as a fraction of the
# largest. The position features of the kinematic workspace dwarf the bias
# feature (coordinates up to ~32 against a constant 1), which floors its
# attainable condition number near 27; the fraction is therefore relaxed to
# exactly the final bound 1/kappa_max there, while the force-control map
# keeps the stricter 0.05.
SIGMA_FRACTION_FORCE = 0.05


def _sigma_fraction(fm: FeatureMap, kappa_max: float) -> float:
    return SIGMA_FRACTION_FORCE if fm.dim == 5 else 1.0 / kappa_max


@dataclass(frozen=True)
class QueryBatch:
    """An ordered list of dim-phi query states with its conditioning record."""

    states: tuple[TaskSpaceState, ...]
    seed: int
    feature_map: FeatureMap
    condition_number: float

    def __post_init__(self):
        if len(self.states) != self.feature_map.dim:
            raise InvalidInputError("batch length must equal the feature dimension")

    def __len__(self) -> int:
        return len(self.states)


def feature_matrix(batch: QueryBatch) -> np.ndarray:
    """Stack the batch into the N x dim feature matrix."""
    return np.vstack([eval_features(batch.feature_map, s) for s in batch.states])


def _sample_state(rng, skill: Skill) -> TaskSpaceState:
    ws = skill.workspace
    pos = np.array([rng.uniform(*ws.x), rng.uniform(*ws.y)])
    if skill.feature_map.dim == 5:
        vel = rng.uniform(-1.0, 1.0, size=2)
    else:
        vel = np.zeros(2)
    return TaskSpaceState(pos, vel)


def generate_query_states(skill: Skill, seed: int,
                          kappa_max: float = DEFAULT_KAPPA_MAX,
                          rng=None) -> QueryBatch:
    """Draw a well-conditioned batch of dim-phi query states.

    ``rng`` overrides the seed-derived generator (used by tests to inject
    degenerate candidate streams). Raises GenerationExhaustedError when no
    acceptable candidate appears within the attempt budget; with the default
    workspaces this signals a degenerate candidate stream, not bad luck,
    since a wedged partial batch is discarded and regrown several times
    before giving up.
    """
    if kappa_max <= 1:
        raise InvalidInputError("kappa_max must exceed 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    dim = skill.feature_map.dim
    fraction = _sigma_fraction(skill.feature_map, kappa_max)
    floor = np.finfo(float).eps

    for _ in range(MAX_BATCH_RESTARTS):
        states: list[TaskSpaceState] = []
        rows: list[np.ndarray] = []
        wedged = False
        while len(rows) < dim:
            for _attempt in range(MAX_ATTEMPTS_PER_ROW):
                cand_state = _sample_state(rng, skill)
                cand = np.vstack(rows + [eval_features(skill.feature_map, cand_state)])
                sigma = np.linalg.svd(cand, compute_uv=False)
                if sigma[-1] <= fraction * (sigma[0] + floor):
                    continue
                if len(cand) == dim and sigma[0] / sigma[-1] > kappa_max:
                    continue
                states.append(cand_state)
                rows.append(cand[-1])
                break
            else:
                wedged = True
                break
        if not wedged:
            phi = np.vstack(rows)
            sigma = np.linalg.svd(phi, compute_uv=False)
            return QueryBatch(states=tuple(states), seed=seed,
                              feature_map=skill.feature_map,
                              condition_number=float(sigma[0] / sigma[-1]))
    raise GenerationExhaustedError(
        f"no acceptable query batch for {skill.id} after "
        f"{MAX_BATCH_RESTARTS} x {MAX_ATTEMPTS_PER_ROW} attempts")


def phase_seed(session_seed: int, phase_number: int, episode_index: int) -> int:
    """Sub-seed for one episode's batch; distinct across phases and episodes."""
    return session_seed + phase_number * 10_007 + episode_index
