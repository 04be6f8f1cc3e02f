"""Ridge-regression skill learning, teaching risk, and the risk-bound factors.

The learner fits each action component independently: for demonstration
features ``Phi`` (N x dim) and actions ``U`` (N x 2), each parameter row
solves the regularized normal equations ``(Phi' Phi + lam I) w = Phi' u``.
The distance between a learnt and a target parameter matrix (the teaching
risk) factors into a bound ``R1 * R2`` where R1 depends only on the query
states and R2 only on the action residuals; both factors are computed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError
from .skills import SkillParameters, vec

DEFAULT_LAMBDA = 1e-6


@dataclass(frozen=True)
class DemonstrationSet:
    """Paired feature matrix (N x dim) and action matrix (N x 2)."""

    features: np.ndarray
    actions: np.ndarray
    skill_id: str = ""

    def __post_init__(self):
        f = np.asarray(self.features, dtype=float)
        a = np.asarray(self.actions, dtype=float)
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "actions", a)
        if f.ndim != 2 or a.ndim != 2 or a.shape[1] != 2:
            raise InvalidInputError(f"bad demonstration shapes {f.shape}, {a.shape}")
        if f.shape[0] != a.shape[0]:
            raise InvalidInputError("feature and action row counts differ")
        if f.shape[0] < 1:
            raise InvalidInputError("at least one demonstration is required")
        if not (np.isfinite(f).all() and np.isfinite(a).all()):
            raise InvalidInputError("non-finite demonstration data")


@dataclass(frozen=True)
class LearnerConfig:
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidInputError("lambda must be non-negative")


def fit(demos: DemonstrationSet, cfg: LearnerConfig = LearnerConfig()) -> SkillParameters:
    """Closed-form ridge fit of the 2 x dim parameter matrix.

    With ``lam == 0`` the features must have full column rank; a singular
    system raises :class:`RankDeficiencyError` instead of returning one of
    the infinitely many interpolants.
    """
    phi = demos.features
    dim = phi.shape[1]
    if cfg.lam == 0 and np.linalg.matrix_rank(phi) < dim:
        raise RankDeficiencyError(
            f"features have rank < {dim}; unregularized fit is underdetermined"
        )
    a = phi.T @ phi + cfg.lam * np.eye(dim)
    w = np.linalg.solve(a, phi.T @ demos.actions)  # dim x 2
    return SkillParameters(w.T)


def teaching_risk(learnt: SkillParameters, target: SkillParameters) -> float:
    """Euclidean distance between stacked parameter vectors.

    Equals the Frobenius norm of the matrix difference, so it is invariant
    to the stacking order.
    """
    if learnt.dim != target.dim:
        raise InvalidInputError(f"dimension mismatch {learnt.dim} != {target.dim}")
    return float(np.linalg.norm(vec(learnt) - vec(target)))


def risk_factor_R1(features: np.ndarray, lam: float) -> float:
    """Spectral norm of the learning map ``(Phi'Phi + lam I)^-1 Phi'``.

    Computed from the singular values of ``Phi`` as max sigma/(sigma^2+lam);
    measures how much the query states amplify action errors.
    """
    phi = np.asarray(features, dtype=float)
    if not np.isfinite(phi).all():
        raise InvalidInputError("non-finite features")
    sigma = np.linalg.svd(phi, compute_uv=False)
    if lam == 0:
        tol = max(phi.shape) * np.finfo(float).eps * (sigma[0] if sigma.size else 0.0)
        if phi.shape[0] < phi.shape[1] or sigma[-1] <= tol:
            raise RankDeficiencyError("singular features with lambda = 0")
    return float(np.max(sigma / (sigma**2 + lam)))


def risk_factor_R2(actions: np.ndarray, optimal: np.ndarray) -> float:
    """Frobenius norm of the action residual matrix ``U - U*``."""
    u = np.asarray(actions, dtype=float)
    ustar = np.asarray(optimal, dtype=float)
    if u.shape != ustar.shape:
        raise InvalidInputError(f"shape mismatch {u.shape} != {ustar.shape}")
    return float(np.linalg.norm(u - ustar))


def residual_norms(actions: np.ndarray, optimal: np.ndarray) -> np.ndarray:
    """Per-demonstration Euclidean residuals; the rows behind R2."""
    u = np.asarray(actions, dtype=float)
    ustar = np.asarray(optimal, dtype=float)
    if u.shape != ustar.shape:
        raise InvalidInputError(f"shape mismatch {u.shape} != {ustar.shape}")
    return np.linalg.norm(u - ustar, axis=1)
