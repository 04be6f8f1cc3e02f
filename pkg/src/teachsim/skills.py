"""Feature maps, skill parameterizations, policy evaluation, and built-in skills.

A skill is a linear-in-features controller: the action at a task-space state
``s`` is ``u = M @ phi(s)`` where ``M`` is a 2 x dim parameter matrix and
``phi`` the skill's feature map. Parameter matrices are interchangeably
handled as matrices or as column-major stacked vectors (``vec``/``unvec``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnknownSkillError, WorkspaceError


@dataclass(frozen=True)
class FeatureMap:
    """Fixed mapping from task-space state to regression features.

    ``ForceControl5`` maps (x, y, vx, vy) to (x, y, vx, vy, 1) and drives a
    force-controlled arm; ``Kinematic3`` maps (x, y) to (x, y, 1) and drives a
    position-controlled arm. The trailing 1 is the bias feature.
    """

    kind: str
    dim: int


FORCE_CONTROL_5 = FeatureMap(kind="ForceControl5", dim=5)
KINEMATIC_3 = FeatureMap(kind="Kinematic3", dim=3)

FEATURE_MAPS = {fm.kind: fm for fm in (FORCE_CONTROL_5, KINEMATIC_3)}


@dataclass(frozen=True)
class Workspace:
    """Axis-aligned rectangle given by its two extreme corners."""

    x: tuple[float, float]
    y: tuple[float, float]

    def __post_init__(self):
        if not (self.x[0] < self.x[1] and self.y[0] < self.y[1]):
            raise WorkspaceError(f"degenerate workspace {self.x} x {self.y}")

    def contains(self, position) -> bool:
        px, py = float(position[0]), float(position[1])
        return self.x[0] <= px <= self.x[1] and self.y[0] <= py <= self.y[1]

    def clamp(self, position: np.ndarray) -> np.ndarray:
        return np.array([
            min(max(position[0], self.x[0]), self.x[1]),
            min(max(position[1], self.y[0]), self.y[1]),
        ])

    @property
    def corners(self) -> list[list[float]]:
        return [[self.x[0], self.y[0]], [self.x[1], self.y[1]]]


@dataclass(frozen=True)
class TaskSpaceState:
    """End-effector position and velocity.

    Units are metres and m/s for the simulated arm, centimetres for the
    kinematic arm (whose velocity is always zero and unused).
    """

    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        if self.position.shape != (2,) or self.velocity.shape != (2,):
            raise InvalidInputError("state vectors must have shape (2,)")


@dataclass(frozen=True)
class SkillParameters:
    """A 2 x dim controller matrix; row 0 produces u_x, row 1 produces u_y."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != 2:
            raise InvalidInputError(f"parameter matrix must be 2 x dim, got {m.shape}")
        if not np.isfinite(m).all():
            raise InvalidInputError("parameter matrix contains non-finite entries")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class Skill:
    """A named target controller over a workspace."""

    id: str
    name: str
    feature_map: FeatureMap
    target: SkillParameters
    workspace: Workspace

    def __post_init__(self):
        if self.target.dim != self.feature_map.dim:
            raise InvalidInputError(
                f"target dim {self.target.dim} != feature dim {self.feature_map.dim}"
            )


def vec(params: SkillParameters) -> np.ndarray:
    """Column-major stacking of the parameter matrix into a 2*dim vector."""
    return params.matrix.flatten(order="F")


def unvec(v, dim: int | None = None) -> SkillParameters:
    """Inverse of :func:`vec`; ``dim`` defaults to len(v) // 2."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 2 != 0:
        raise InvalidInputError(f"expected a flat 2*dim vector, got shape {v.shape}")
    if dim is None:
        dim = v.size // 2
    if v.size != 2 * dim:
        raise InvalidInputError(f"vector length {v.size} != 2*{dim}")
    return SkillParameters(v.reshape((2, dim), order="F"))


def eval_features(fm: FeatureMap, s: TaskSpaceState) -> np.ndarray:
    """Evaluate phi(s); the last entry is always exactly 1."""
    if not (np.isfinite(s.position).all() and np.isfinite(s.velocity).all()):
        raise InvalidInputError("non-finite task-space state")
    if fm.kind == "ForceControl5":
        return np.array([s.position[0], s.position[1], s.velocity[0], s.velocity[1], 1.0])
    if fm.kind == "Kinematic3":
        return np.array([s.position[0], s.position[1], 1.0])
    raise InvalidInputError(f"unknown feature map kind {fm.kind!r}")


def policy_action(params: SkillParameters, phi: np.ndarray) -> np.ndarray:
    """u = M @ phi as a 2-vector."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (params.dim,):
        raise InvalidInputError(f"feature vector shape {phi.shape} != ({params.dim},)")
    return params.matrix @ phi


def optimal_action(skill: Skill, s: TaskSpaceState) -> np.ndarray:
    """The target controller's action at ``s``; the reference used by guidance."""
    if not skill.workspace.contains(s.position):
        raise WorkspaceError(f"state {s.position} outside workspace of {skill.id}")
    return policy_action(skill.target, eval_features(skill.feature_map, s))


# Default workspaces: the simulated arm works above its base within reach of
# the two 1 m links; the kinematic arm's box sits inside its radial reach.
SIM_WORKSPACE = Workspace(x=(-2.0, 2.0), y=(0.0, 2.0))
KINEMATIC_WORKSPACE = Workspace(x=(5.0, 32.0), y=(-20.0, 20.0))

# Demonstration magnitude caps (per action, generous on purpose so that the
# optimal action is never clipped anywhere in the workspace): newtons for the
# force-controlled arm, centimetres for the kinematic arm. The kinematic
# arm's separate 5 cm per-integration-step motion clip lives in dynamics.
SIM_ACTION_CAP = 20.0
KINEMATIC_ACTION_CAP = 20.0

_BUILTIN_VECS = {
    "sim-s1": ("Point reaching (sim)", FORCE_CONTROL_5, SIM_WORKSPACE,
               [-1, 0, 0, -1, -1, 0, 0, -1, 0.8, 1.2]),
    "sim-s2": ("Line following (sim)", FORCE_CONTROL_5, SIM_WORKSPACE,
               [-1, 0, 0, 0, -1, 0, 0, -1, 0.8, 0]),
    "phys-s1": ("Point reaching (kinematic)", KINEMATIC_3, KINEMATIC_WORKSPACE,
                [-0.2, 0, 0, -0.2, 4.6, 2.2]),
    "phys-s2": ("Line following (kinematic)", KINEMATIC_3, KINEMATIC_WORKSPACE,
                [-0.04, 0.08, 0.08, -0.16, 0, 0]),
}


def builtin_skills() -> list[Skill]:
    """The four built-in skills: point and line skills for each embodiment."""
    out = []
    for sid, (name, fm, ws, v) in _BUILTIN_VECS.items():
        out.append(Skill(id=sid, name=name, feature_map=fm,
                         target=unvec(np.array(v, dtype=float), fm.dim), workspace=ws))
    return out


def get_skill(skill_id: str) -> Skill:
    for skill in builtin_skills():
        if skill.id == skill_id:
            return skill
    raise UnknownSkillError(f"unknown skill id {skill_id!r}")


def clip_action(u: np.ndarray, cap: float) -> np.ndarray:
    """Scale ``u`` down to ``cap`` if its norm exceeds it; direction preserved."""
    n = float(np.linalg.norm(u))
    if n > cap:
        return u * (cap / n)
    return np.asarray(u, dtype=float)
