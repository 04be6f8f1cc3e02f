"""Forward simulation of the two robot embodiments.

The simulated embodiment is a planar two-link arm with a point mass at the
end of each link, driven by end-effector forces through the Jacobian
transpose and integrated with semi-implicit Euler at 1 kHz. The physical-like
embodiment is a kinematic arm that moves by bounded position deltas.

During closed-loop rollouts the arm plant is gravity-compensated: the joint
torque is ``J' u + g(q)`` so the taught policy only has to shape the motion,
not hold the arm up. ``step`` exposes the raw un-compensated dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rollout import arm_rollout_kernel
from .errors import InvalidInputError, WorkspaceError
from .skills import (
    KINEMATIC_WORKSPACE,
    SIM_WORKSPACE,
    FeatureMap,
    SkillParameters,
    TaskSpaceState,
    Workspace,
    clip_action,
)

SIM_ACTION_FORCE_CAP = 20.0  # newtons, applied to policy output during rollout
KINEMATIC_STEP_SECONDS = 0.05  # timestamp spacing for kinematic trajectories
DEFAULT_SIM_REPLAY_SECONDS = 10.0
DEFAULT_KINEMATIC_REPLAY_STEPS = 200
REPLAY_SAMPLE_HZ = 50.0


@dataclass(frozen=True)
class ArmModel:
    """Two-link planar arm, point masses at the link ends."""

    l1: float = 1.0
    l2: float = 1.0
    m1: float = 1.0
    m2: float = 1.0
    g: float = 9.81
    dt: float = 1e-3
    workspace: Workspace = SIM_WORKSPACE

    def __post_init__(self):
        if min(self.l1, self.l2, self.m1, self.m2, self.g, self.dt) <= 0:
            raise InvalidInputError("arm parameters must be positive")


@dataclass(frozen=True)
class KinematicModel:
    """Position-controlled arm: each step moves by at most ``max_step`` cm."""

    workspace: Workspace = KINEMATIC_WORKSPACE
    max_step: float = 5.0

    def __post_init__(self):
        if self.max_step <= 0:
            raise InvalidInputError("max_step must be positive")


@dataclass(frozen=True)
class JointState:
    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        qd = np.asarray(self.qdot, dtype=float)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qd)
        if q.shape != (2,) or qd.shape != (2,):
            raise InvalidInputError("joint vectors must have shape (2,)")
        if not (np.isfinite(q).all() and np.isfinite(qd).all()):
            raise InvalidInputError("non-finite joint state")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled closed-loop rollout.

    ``dt`` is the sample spacing; ``sim_dt`` the integration step behind it
    (they differ when samples are decimated for storage/streaming).
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    actions: np.ndarray
    dt: float
    sim_dt: float

    def __post_init__(self):
        for name in ("times", "positions", "velocities", "actions"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.times.shape[0]
        if self.positions.shape != (n, 2) or self.velocities.shape != (n, 2) \
                or self.actions.shape != (n, 2):
            raise InvalidInputError("trajectory arrays must share the sample count")
        if n > 1:
            gaps = np.diff(self.times)
            if not np.allclose(gaps, self.dt, rtol=0, atol=1e-9):
                raise InvalidInputError("timestamps must increase uniformly by dt")

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def final_state(self) -> TaskSpaceState:
        return TaskSpaceState(self.positions[-1], self.velocities[-1])


def forward_kinematics(m: ArmModel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.array([
        m.l1 * math.cos(q[0]) + m.l2 * math.cos(q[0] + q[1]),
        m.l1 * math.sin(q[0]) + m.l2 * math.sin(q[0] + q[1]),
    ])


def jacobian(m: ArmModel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    s1, c1 = math.sin(q[0]), math.cos(q[0])
    s12, c12 = math.sin(q[0] + q[1]), math.cos(q[0] + q[1])
    return np.array([
        [-m.l1 * s1 - m.l2 * s12, -m.l2 * s12],
        [m.l1 * c1 + m.l2 * c12, m.l2 * c12],
    ])


def mass_matrix(m: ArmModel, q) -> np.ndarray:
    c2 = math.cos(q[1])
    m11 = (m.m1 + m.m2) * m.l1**2 + m.m2 * m.l2**2 + 2 * m.m2 * m.l1 * m.l2 * c2
    m12 = m.m2 * m.l2**2 + m.m2 * m.l1 * m.l2 * c2
    m22 = m.m2 * m.l2**2
    return np.array([[m11, m12], [m12, m22]])


def coriolis_matrix(m: ArmModel, q, qdot) -> np.ndarray:
    h = m.m2 * m.l1 * m.l2 * math.sin(q[1])
    return np.array([
        [-h * qdot[1], -h * (qdot[0] + qdot[1])],
        [h * qdot[0], 0.0],
    ])


def gravity_vector(m: ArmModel, q) -> np.ndarray:
    c1 = math.cos(q[0])
    c12 = math.cos(q[0] + q[1])
    return np.array([
        (m.m1 + m.m2) * m.g * m.l1 * c1 + m.m2 * m.g * m.l2 * c12,
        m.m2 * m.g * m.l2 * c12,
    ])


def potential_energy(m: ArmModel, q) -> float:
    """Gravitational potential, zero with both links horizontal."""
    return float((m.m1 + m.m2) * m.g * m.l1 * math.sin(q[0])
                 + m.m2 * m.g * m.l2 * math.sin(q[0] + q[1]))


def total_energy(m: ArmModel, s: JointState) -> float:
    return float(0.5 * s.qdot @ mass_matrix(m, s.q) @ s.qdot + potential_energy(m, s.q))


def step(m: ArmModel, s: JointState, u) -> JointState:
    """One semi-implicit Euler step of the raw dynamics under end-effector force u."""
    u = np.asarray(u, dtype=float)
    mass = mass_matrix(m, s.q)
    rhs = jacobian(m, s.q).T @ u - coriolis_matrix(m, s.q, s.qdot) @ s.qdot \
        - gravity_vector(m, s.q)
    det = mass[0, 0] * mass[1, 1] - mass[0, 1] * mass[1, 0]
    if not det > 0:  # cannot happen for this inertia model; guards corrupt input
        raise InvalidInputError("singular mass matrix")
    qdd = np.linalg.solve(mass, rhs)
    qdot = s.qdot + qdd * m.dt
    return JointState(s.q + qdot * m.dt, qdot)


def inverse_kinematics(m: ArmModel, position, elbow: float = 1.0) -> np.ndarray:
    """Joint angles reaching ``position``; ``elbow`` picks the branch sign."""
    x, y = float(position[0]), float(position[1])
    r2 = x * x + y * y
    c2 = (r2 - m.l1**2 - m.l2**2) / (2 * m.l1 * m.l2)
    if not -1.0 <= c2 <= 1.0:
        raise WorkspaceError(f"position {position} is out of reach")
    q2 = math.copysign(math.acos(c2), elbow)
    q1 = math.atan2(y, x) - math.atan2(m.l2 * math.sin(q2), m.l1 + m.l2 * math.cos(q2))
    return np.array([q1, q2])


def _arm_rollout(m: ArmModel, params: SkillParameters, start: TaskSpaceState,
                 n_steps: int, stride: int) -> Trajectory:
    q = inverse_kinematics(m, start.position)
    jac = jacobian(m, q)
    # least squares instead of solve: tolerates singular configurations
    # (straight arm) when the requested start velocity is zero
    qd = np.linalg.lstsq(jac, start.velocity, rcond=None)[0]
    out = np.empty((n_steps // stride + 1, 6))
    arm_rollout_kernel(np.ascontiguousarray(params.matrix), q[0], q[1], qd[0], qd[1],
                       m.l1, m.l2, m.m1, m.m2, m.g, m.dt, n_steps,
                       SIM_ACTION_FORCE_CAP, stride, out)
    times = np.arange(out.shape[0]) * (stride * m.dt)
    return Trajectory(times=times, positions=out[:, 0:2], velocities=out[:, 2:4],
                      actions=out[:, 4:6], dt=stride * m.dt, sim_dt=m.dt)


def _kinematic_rollout(m: KinematicModel, params: SkillParameters,
                       start: TaskSpaceState, n_steps: int) -> Trajectory:
    pos = np.asarray(start.position, dtype=float).copy()
    positions = np.empty((n_steps + 1, 2))
    actions = np.empty((n_steps + 1, 2))
    for i in range(n_steps + 1):
        u = params.matrix @ np.array([pos[0], pos[1], 1.0])
        positions[i] = pos
        actions[i] = u
        if i == n_steps:
            break
        pos = m.workspace.clamp(pos + clip_action(u, m.max_step))
    times = np.arange(n_steps + 1) * KINEMATIC_STEP_SECONDS
    return Trajectory(times=times, positions=positions,
                      velocities=np.zeros_like(positions), actions=actions,
                      dt=KINEMATIC_STEP_SECONDS, sim_dt=KINEMATIC_STEP_SECONDS)


def rollout(model, params: SkillParameters, fm: FeatureMap, start: TaskSpaceState,
            duration: float | None = None, steps: int | None = None) -> Trajectory:
    """Closed-loop execution of a learnt policy from a fixed start.

    For the arm, ``duration`` is seconds of simulated time (default 10) and
    samples are stored at 50 Hz. For the kinematic model, ``steps`` counts
    position updates (default 200) and every step is stored.
    """
    if not model.workspace.contains(start.position):
        raise WorkspaceError(f"rollout start {start.position} outside workspace")
    if isinstance(model, ArmModel):
        if fm.dim != 5:
            raise InvalidInputError("the arm requires the 5-feature force policy")
        if params.dim != 5:
            raise InvalidInputError("parameter dim must be 5 for the arm")
        seconds = DEFAULT_SIM_REPLAY_SECONDS if duration is None else float(duration)
        stride = max(1, round(1.0 / (REPLAY_SAMPLE_HZ * model.dt)))
        n_steps = max(stride, round(seconds / model.dt))
        n_steps -= n_steps % stride  # keep samples uniformly spaced
        return _arm_rollout(model, params, start, n_steps, stride)
    if isinstance(model, KinematicModel):
        if fm.dim != 3 or params.dim != 3:
            raise InvalidInputError("the kinematic arm requires the 3-feature policy")
        if steps is None:
            steps = DEFAULT_KINEMATIC_REPLAY_STEPS if duration is None \
                else max(1, round(duration / KINEMATIC_STEP_SECONDS))
        return _kinematic_rollout(model, params, start, int(steps))
    raise InvalidInputError(f"unknown model type {type(model).__name__}")
