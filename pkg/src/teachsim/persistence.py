"""Durable, replayable session logs and experiment configuration files.

Logs are JSON, one session per file, optionally gzipped. All numeric fields
use shortest round-trip float serialization, so a load followed by a save
is lossless and replaying the stored demonstrations through the learner and
dynamics reproduces the stored results on the same build. Replay
trajectories are stored at their 50 Hz sample rate with both the sample and
integration steps recorded.
"""

from __future__ import annotations

import gzip
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, rollout
from .errors import LogParseError, UnsupportedVersionError
from .learner import DemonstrationSet, LearnerConfig, fit, teaching_risk
from .protocol import EMBODIMENT_INFO, EpisodeRecord, SessionConfig, SessionState
from .queries import QueryBatch, feature_matrix
from .skills import FEATURE_MAPS, SkillParameters, TaskSpaceState, get_skill

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SessionLog:
    format_version: int
    session_id: str
    config: SessionConfig
    episodes: tuple[EpisodeRecord, ...]
    created_at: float


def session_log(state: SessionState, session_id: str,
                created_at: float | None = None) -> SessionLog:
    return SessionLog(format_version=FORMAT_VERSION, session_id=session_id,
                      config=state.config, episodes=tuple(state.records),
                      created_at=time.time() if created_at is None else created_at)


# -- JSON codec -------------------------------------------------------------

def _encode_trajectory(t: Trajectory) -> dict:
    return {
        "dt": t.dt,
        "sim_dt": t.sim_dt,
        "positions": t.positions.tolist(),
        "velocities": t.velocities.tolist(),
        "actions": t.actions.tolist(),
    }


def _decode_trajectory(d: dict) -> Trajectory:
    n = len(d["positions"])
    return Trajectory(times=np.arange(n) * d["dt"], positions=d["positions"],
                      velocities=d["velocities"], actions=d["actions"],
                      dt=d["dt"], sim_dt=d["sim_dt"])


def _encode_batch(b: QueryBatch) -> dict:
    return {
        "seed": b.seed,
        "feature_map": b.feature_map.kind,
        "condition_number": b.condition_number,
        "positions": [s.position.tolist() for s in b.states],
        "velocities": [s.velocity.tolist() for s in b.states],
    }


def _decode_batch(d: dict) -> QueryBatch:
    states = tuple(TaskSpaceState(p, v)
                   for p, v in zip(d["positions"], d["velocities"]))
    return QueryBatch(states=states, seed=d["seed"],
                      feature_map=FEATURE_MAPS[d["feature_map"]],
                      condition_number=d["condition_number"])


def _encode_episode(r: EpisodeRecord) -> dict:
    return {
        "phase": r.phase,
        "episode_index": r.episode_index,
        "skill_id": r.skill_id,
        "batch": _encode_batch(r.batch),
        "actions": [u.tolist() for u in r.actions],
        "learnt": r.learnt.matrix.tolist(),
        "error_e": r.error_e,
        "replay": _encode_trajectory(r.replay),
        "guidance_shown": r.guidance_shown,
        "started_at": r.started_at,
        "finished_at": r.finished_at,
    }


def _decode_episode(d: dict) -> EpisodeRecord:
    return EpisodeRecord(
        phase=d["phase"], episode_index=d["episode_index"],
        skill_id=d["skill_id"], batch=_decode_batch(d["batch"]),
        actions=tuple(np.asarray(u, dtype=float) for u in d["actions"]),
        learnt=SkillParameters(np.asarray(d["learnt"], dtype=float)),
        error_e=d["error_e"], replay=_decode_trajectory(d["replay"]),
        guidance_shown=d["guidance_shown"], started_at=d["started_at"],
        finished_at=d["finished_at"])


def _encode_config(c: SessionConfig) -> dict:
    return {
        "group": c.group, "embodiment": c.embodiment, "seed": c.seed,
        "lam": c.lam, "kappa_max": c.kappa_max,
        "skill1_id": c.skill1_id, "skill2_id": c.skill2_id,
    }


def _decode_config(d: dict) -> SessionConfig:
    return SessionConfig(group=d["group"], embodiment=d["embodiment"],
                         seed=d["seed"], lam=d["lam"], kappa_max=d["kappa_max"],
                         skill1_id=d["skill1_id"], skill2_id=d["skill2_id"])


def encode_log(log: SessionLog) -> dict:
    return {
        "format_version": log.format_version,
        "session_id": log.session_id,
        "created_at": log.created_at,
        "config": _encode_config(log.config),
        "episodes": [_encode_episode(r) for r in log.episodes],
    }


def decode_log(d: dict) -> SessionLog:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"log format_version {version!r} is not supported (expected "
            f"{FORMAT_VERSION})")
    return SessionLog(format_version=version, session_id=d["session_id"],
                      config=_decode_config(d["config"]),
                      episodes=tuple(_decode_episode(e) for e in d["episodes"]),
                      created_at=d["created_at"])


# -- File I/O ---------------------------------------------------------------

def save_session(log: SessionLog, path) -> None:
    """Atomically write the log; the previous file survives a crash mid-write."""
    path = str(path)
    data = json.dumps(encode_log(log), indent=1).encode()
    if path.endswith(".gz"):
        data = gzip.compress(data, mtime=0)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def load_session(path) -> SessionLog:
    path = str(path)
    opener = gzip.open if path.endswith(".gz") else open
    try:
        with opener(path, "rb") as fh:
            raw = fh.read()
    except (OSError, EOFError) as exc:
        raise LogParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        offset = getattr(exc, "pos", None)
        raise LogParseError(f"malformed session log {path}: {exc}",
                            byte_offset=offset) from exc
    return decode_log(doc)


# -- Replay verification ----------------------------------------------------

@dataclass(frozen=True)
class ReplayReport:
    per_episode: tuple[dict, ...]
    max_delta: float


def replay_verify(log: SessionLog) -> ReplayReport:
    """Re-run learning and rollout from stored demonstrations and diff.

    On the build that wrote the log every recomputed quantity follows the
    same arithmetic path, so deltas are zero; the documented cross-build
    tolerance is 1e-9.
    """
    from .protocol import ArmModel, KinematicModel  # local to avoid cycle noise

    cfg = log.config
    model = ArmModel() if cfg.embodiment == "SimArm" else KinematicModel()
    start = EMBODIMENT_INFO[cfg.embodiment]["replay_start"]
    reports = []
    worst = 0.0
    for rec in log.episodes:
        skill = get_skill(rec.skill_id)
        demos = DemonstrationSet(features=feature_matrix(rec.batch),
                                 actions=np.vstack(rec.actions),
                                 skill_id=rec.skill_id)
        learnt = fit(demos, LearnerConfig(cfg.lam))
        error_e = teaching_risk(learnt, skill.target)
        n_steps = len(rec.replay) - 1
        if cfg.embodiment == "SimArm":
            duration = n_steps * rec.replay.dt
            replay = rollout(model, learnt, skill.feature_map, start,
                             duration=duration)
        else:
            replay = rollout(model, learnt, skill.feature_map, start,
                             steps=n_steps)
        deltas = {
            "learnt": float(np.max(np.abs(learnt.matrix - rec.learnt.matrix))),
            "error_e": abs(error_e - rec.error_e),
            "trajectory": float(max(
                np.max(np.abs(replay.positions - rec.replay.positions)),
                np.max(np.abs(replay.velocities - rec.replay.velocities)),
                np.max(np.abs(replay.actions - rec.replay.actions)))),
        }
        worst = max(worst, *deltas.values())
        reports.append({"phase": rec.phase, "episode_index": rec.episode_index,
                        **deltas})
    return ReplayReport(per_episode=tuple(reports), max_delta=worst)


# -- Experiment configuration ------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one batch run."""

    n_per_group: int = 32
    embodiments: tuple[str, ...] = ("SimArm",)
    master_seed: int = 20_240_401
    lam: float = LearnerConfig().lam
    kappa_max: float = 100.0
    gain_range: tuple[float, float] = (1.5, 3.0)
    bias_range: tuple[float, float] = (-0.5, 0.5)
    noise_sigma_factor: float = 0.15
    adapt_rate: float = 0.35


def load_experiment_config(path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            doc = json.loads(fh.read().decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise LogParseError(f"malformed config {path}: {exc}",
                            byte_offset=getattr(exc, "pos", None)) from exc
    base = ExperimentConfig()
    return ExperimentConfig(
        n_per_group=doc.get("n_per_group", base.n_per_group),
        embodiments=tuple(doc.get("embodiments", base.embodiments)),
        master_seed=doc.get("master_seed", base.master_seed),
        lam=doc.get("lam", base.lam),
        kappa_max=doc.get("kappa_max", base.kappa_max),
        gain_range=tuple(doc.get("gain_range", base.gain_range)),
        bias_range=tuple(doc.get("bias_range", base.bias_range)),
        noise_sigma_factor=doc.get("noise_sigma_factor", base.noise_sigma_factor),
        adapt_rate=doc.get("adapt_rate", base.adapt_rate),
    )


def save_experiment_config(cfg: ExperimentConfig, path) -> None:
    doc = {
        "n_per_group": cfg.n_per_group,
        "embodiments": list(cfg.embodiments),
        "master_seed": cfg.master_seed,
        "lam": cfg.lam,
        "kappa_max": cfg.kappa_max,
        "gain_range": list(cfg.gain_range),
        "bias_range": list(cfg.bias_range),
        "noise_sigma_factor": cfg.noise_sigma_factor,
        "adapt_rate": cfg.adapt_rate,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
