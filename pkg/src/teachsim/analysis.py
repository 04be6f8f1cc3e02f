"""Group-level evaluation: per-episode aggregates, deltas, and significance.

The experiment's three headline quantities are deltas over the 12 episode
slots of a session: improvement (last guided episode vs the first baseline),
retention (the post-guidance episode vs baseline), and generalisation (the
second skill after vs before guidance). Significance uses Welch's
unequal-variance t-test, implemented from scratch on top of the regularized
incomplete beta function.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SLOT_LABELS = ("P1E1", "P2E1", "P3E1", "P3E2", "P3E3", "P3E4", "P3E5", "P3E6",
               "P3E7", "P3E8", "P4E1", "P5E1")
_SLOT_INDEX = {label: i for i, label in enumerate(SLOT_LABELS)}

EPISODE_CSV_COLUMNS = ("subject_id", "group", "embodiment", "phase", "episode",
                       "skill_id", "error_e", "guidance_shown", "seed")


# -- Welch's t-test ---------------------------------------------------------

_BETA_MAX_ITER = 300
_BETA_EPS = 1e-15
_BETA_FPMIN = 1e-300


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz evaluation of the continued fraction behind the incomplete beta."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise InvalidInputError("beta parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # the continued fraction converges fast only on one side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def welch_t_test(a, b, one_sided: bool = False) -> tuple[float, float, bool]:
    """Welch's unequal-variance t-test of mean(a) against mean(b).

    Returns (t, p, one_sided); the one-sided alternative is mean(a) > mean(b).
    Degrees of freedom follow the Welch-Satterthwaite approximation and the
    p-value comes from the regularized incomplete beta function.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise InvalidInputError("each sample needs at least 2 values")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    na, nb = a.size, b.size
    se2 = va / na + vb / nb
    diff = float(a.mean() - b.mean())
    if se2 == 0.0:
        if diff == 0.0:
            return 0.0, 1.0, one_sided
        t = math.inf if diff > 0 else -math.inf
        p = 0.0
    else:
        t = diff / math.sqrt(se2)
        df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
        p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    if one_sided:
        p = p / 2.0 if t > 0 else 1.0 - p / 2.0
    return t, p, one_sided


# -- Group aggregation ------------------------------------------------------

@dataclass(frozen=True)
class GroupStats:
    """Per-slot aggregates and the three per-subject deltas of one group."""

    n_subjects: int
    per_episode_mean: np.ndarray
    per_episode_std: np.ndarray
    delta_mean: dict[str, float]
    delta_std: dict[str, float]
    percent: dict[str, float]
    per_subject_delta: dict[str, np.ndarray]
    per_subject_percent: dict[str, np.ndarray]


def _errors_matrix(summaries) -> np.ndarray:
    """Stack session summaries into (n_subjects, 12), validating slot order."""
    rows = []
    for summary in summaries:
        if len(summary) != len(SLOT_LABELS):
            raise InvalidInputError(
                f"incomplete session: {len(summary)} episodes, "
                f"expected {len(SLOT_LABELS)}")
        errors = np.empty(len(SLOT_LABELS))
        for (phase, episode, error_e), expected in zip(summary, SLOT_LABELS):
            label = f"{phase}E{episode}"
            if label != expected:
                raise InvalidInputError(f"episode {label} out of order, "
                                        f"expected {expected}")
            errors[_SLOT_INDEX[label]] = error_e
        rows.append(errors)
    return np.vstack(rows)


_DELTA_SLOTS = {
    "improvement": ("P3E8", "P1E1"),
    "retention": ("P4E1", "P1E1"),
    "generalisation": ("P5E1", "P2E1"),
}


def aggregate(summaries) -> GroupStats:
    """Aggregate complete session summaries into group statistics.

    Deltas are late-minus-early, so negative values mean the teaching got
    better. Percentages are computed on the group means; per-subject values
    are also exposed. With one subject the standard deviations are reported
    as NaN after an explicit warning.
    """
    errors = _errors_matrix(summaries)
    n = errors.shape[0]
    if n < 2:
        warnings.warn("fewer than 2 subjects: standard deviations are undefined",
                      stacklevel=2)
        std = np.full(errors.shape[1], np.nan)
    else:
        std = errors.std(axis=0, ddof=1)
    mean = errors.mean(axis=0)

    delta_mean, delta_std = {}, {}
    per_subject_delta, per_subject_percent, percent = {}, {}, {}
    for name, (late, early) in _DELTA_SLOTS.items():
        late_e = errors[:, _SLOT_INDEX[late]]
        early_e = errors[:, _SLOT_INDEX[early]]
        deltas = late_e - early_e
        per_subject_delta[name] = deltas
        per_subject_percent[name] = 100.0 * (early_e - late_e) / early_e
        delta_mean[name] = float(deltas.mean())
        delta_std[name] = float(deltas.std(ddof=1)) if n >= 2 else float("nan")
        early_mean = mean[_SLOT_INDEX[early]]
        percent[name] = float(100.0 * (early_mean - mean[_SLOT_INDEX[late]])
                              / early_mean)
    return GroupStats(n_subjects=n, per_episode_mean=mean, per_episode_std=std,
                      delta_mean=delta_mean, delta_std=delta_std, percent=percent,
                      per_subject_delta=per_subject_delta,
                      per_subject_percent=per_subject_percent)


# -- CSV export -------------------------------------------------------------

def _fmt(value) -> str:
    """Round-trip-exact cell text: shortest repr for floats, plain otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_episode_csv(path, results) -> None:
    """One row per (subject, episode) across all sessions of a run."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EPISODE_CSV_COLUMNS)
        for res in results:
            for rec in res.state.records:
                writer.writerow([
                    res.subject_id, res.config.group, res.config.embodiment,
                    rec.phase, _fmt(rec.episode_index), rec.skill_id,
                    _fmt(rec.error_e), _fmt(rec.guidance_shown),
                    _fmt(res.config.seed),
                ])


def write_group_stats_csv(path, stats: GroupStats) -> None:
    """GroupStats flattened to rows of (statistic, slot_or_delta, value)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["statistic", "key", "value"])
        writer.writerow(["n_subjects", "", _fmt(stats.n_subjects)])
        for i, label in enumerate(SLOT_LABELS):
            writer.writerow(["episode_mean", label, _fmt(float(stats.per_episode_mean[i]))])
            writer.writerow(["episode_std", label, _fmt(float(stats.per_episode_std[i]))])
        for name in _DELTA_SLOTS:
            writer.writerow(["delta_mean", name, _fmt(stats.delta_mean[name])])
            writer.writerow(["delta_std", name, _fmt(stats.delta_std[name])])
            writer.writerow(["percent_improvement", name, _fmt(stats.percent[name])])
