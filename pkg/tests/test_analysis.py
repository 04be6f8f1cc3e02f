import csv

import numpy as np
import pytest

from teachsim import (
    EPISODE_CSV_COLUMNS,
    SLOT_LABELS,
    InvalidInputError,
    SkillParameters,
    aggregate,
    get_skill,
    regularized_incomplete_beta,
    run_group,
    session_summary,
    teaching_risk,
    welch_t_test,
    write_episode_csv,
    write_group_stats_csv,
)

# Frozen oracles, computed once with scipy.stats.ttest_ind(equal_var=False)
# and scipy.stats.t.sf and pasted here verbatim.
PAIR1_A = [2.3, 1.9, 2.8, 3.1, 2.2, 2.6, 1.7, 2.9]
PAIR1_B = [1.1, 0.9, 1.5, 1.2, 0.8, 1.4, 1.0, 1.3]
PAIR1_T = 6.588116038732265
PAIR1_P_TWO = 5.5475403503885456e-05
PAIR1_P_GREATER = 2.7737701751942728e-05

# Frozen oracle: 2-norm of the stacked sim-s1 parameters, i.e. the distance
# between that skill and twice itself: sqrt(1+1+1+1+0.64+1.44) = sqrt(6.08).
SIM_S1_VEC_NORM = 2.4657656011875906


class TestWelch:
    def test_frozen_two_sided(self):
        t, p, one_sided = welch_t_test(PAIR1_A, PAIR1_B)
        assert not one_sided
        assert t == pytest.approx(PAIR1_T, rel=1e-12)
        assert p == pytest.approx(PAIR1_P_TWO, rel=1e-10)

    def test_frozen_one_sided(self):
        t, p, one_sided = welch_t_test(PAIR1_A, PAIR1_B, one_sided=True)
        assert one_sided
        assert t == pytest.approx(PAIR1_T, rel=1e-12)
        assert p == pytest.approx(PAIR1_P_GREATER, rel=1e-10)

    def test_identical_zero_variance_samples(self):
        t, p, _ = welch_t_test([2.0, 2.0, 2.0], [2.0, 2.0, 2.0])
        assert (t, p) == (0.0, 1.0)

    def test_zero_variance_separated_samples(self):
        t, p, _ = welch_t_test([3.0, 3.0], [1.0, 1.0])
        assert t == np.inf
        assert p == 0.0

    def test_symmetry(self):
        t_ab, p_ab, _ = welch_t_test(PAIR1_A, PAIR1_B)
        t_ba, p_ba, _ = welch_t_test(PAIR1_B, PAIR1_A)
        assert t_ba == pytest.approx(-t_ab)
        assert p_ba == pytest.approx(p_ab)

    def test_one_sided_wrong_direction_is_large(self):
        _, p, _ = welch_t_test(PAIR1_B, PAIR1_A, one_sided=True)
        assert p == pytest.approx(1.0 - PAIR1_P_GREATER, rel=1e-9)

    def test_matches_scipy_on_random_samples(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(8)
        for _ in range(25):
            a = rng.normal(loc=rng.uniform(-1, 1), scale=rng.uniform(0.5, 2),
                           size=rng.integers(3, 30))
            b = rng.normal(loc=rng.uniform(-1, 1), scale=rng.uniform(0.5, 2),
                           size=rng.integers(3, 30))
            t, p, _ = welch_t_test(a, b)
            ref = scipy_stats.ttest_ind(a, b, equal_var=False)
            assert t == pytest.approx(ref.statistic, rel=1e-10)
            assert p == pytest.approx(ref.pvalue, rel=1e-9)

    def test_short_samples_rejected(self):
        with pytest.raises(InvalidInputError):
            welch_t_test([1.0], [1.0, 2.0])


class TestIncompleteBeta:
    def test_endpoints(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_symmetric_midpoint(self):
        assert regularized_incomplete_beta(2.5, 2.5, 0.5) == pytest.approx(0.5)

    def test_uniform_case_is_identity(self):
        for x in (0.1, 0.37, 0.9):
            assert regularized_incomplete_beta(1.0, 1.0, x) == pytest.approx(x)

    def test_matches_scipy(self):
        special = pytest.importorskip("scipy.special")
        rng = np.random.default_rng(4)
        for _ in range(50):
            a, b = rng.uniform(0.2, 30, size=2)
            x = rng.uniform(0.001, 0.999)
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                special.betainc(a, b, x), rel=1e-10, abs=1e-14)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidInputError):
            regularized_incomplete_beta(0.0, 1.0, 0.5)


class TestFrozenRiskExample:
    def test_doubling_sim_s1_distance(self):
        target = get_skill("sim-s1").target
        doubled = SkillParameters(2.0 * target.matrix)
        assert teaching_risk(doubled, target) == pytest.approx(
            SIM_S1_VEC_NORM, rel=1e-12)


def fake_summary(errors):
    plan = [("P1", 1), ("P2", 1)] + [("P3", i) for i in range(1, 9)] \
        + [("P4", 1), ("P5", 1)]
    return [(p, e, err) for (p, e), err in zip(plan, errors)]


class TestAggregate:
    def test_slot_means_and_deltas(self):
        s1 = fake_summary([4.0, 3.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0, 1.5, 2.0])
        s2 = fake_summary([6.0, 5.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 3.0, 2.5, 4.0])
        stats = aggregate([s1, s2])
        assert stats.n_subjects == 2
        assert stats.per_episode_mean[0] == pytest.approx(5.0)  # P1E1
        # improvement: P3E8 - P1E1 per subject: -3 and -3
        np.testing.assert_allclose(stats.per_subject_delta["improvement"], [-3.0, -3.0])
        assert stats.delta_mean["improvement"] == pytest.approx(-3.0)
        # retention: P4E1 - P1E1: -2.5 and -3.5
        assert stats.delta_mean["retention"] == pytest.approx(-3.0)
        assert stats.delta_std["retention"] == pytest.approx(np.std([-2.5, -3.5], ddof=1))
        # generalisation: P5E1 - P2E1: -1 and -1
        assert stats.delta_mean["generalisation"] == pytest.approx(-1.0)

    def test_percent_on_group_means(self):
        s1 = fake_summary([4.0, 2.0, 1, 1, 1, 1, 1, 1, 1, 2.0, 2.0, 1.0])
        s2 = fake_summary([6.0, 2.0, 1, 1, 1, 1, 1, 1, 1, 3.0, 3.0, 1.0])
        stats = aggregate([s1, s2])
        # improvement percent: (mean P1E1 - mean P3E8) / mean P1E1 = (5-2.5)/5
        assert stats.percent["improvement"] == pytest.approx(50.0)

    def test_out_of_order_summary_rejected(self):
        rows = fake_summary(range(12))
        rows[1], rows[2] = rows[2], rows[1]
        with pytest.raises(InvalidInputError):
            aggregate([rows])

    def test_incomplete_summary_rejected(self):
        with pytest.raises(InvalidInputError):
            aggregate([fake_summary(range(12))[:11]])

    def test_single_subject_warns_nan_std(self):
        with pytest.warns(UserWarning):
            stats = aggregate([fake_summary([2.0] * 12)])
        assert np.isnan(stats.per_episode_std).all()
        assert np.isnan(stats.delta_std["improvement"])

    def test_slot_labels_cover_session(self):
        assert len(SLOT_LABELS) == 12
        assert SLOT_LABELS[0] == "P1E1" and SLOT_LABELS[-1] == "P5E1"


@pytest.fixture(scope="module")
def results():
    return run_group(2, "Target", "SimArm", master_seed=99)


class TestCsvExport:
    def test_episode_csv_layout(self, tmp_path, results):
        path = tmp_path / "episodes.csv"
        write_episode_csv(path, results)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == list(EPISODE_CSV_COLUMNS)
        assert len(rows) == 1 + 2 * 12
        first = dict(zip(EPISODE_CSV_COLUMNS, rows[1]))
        assert first["subject_id"] == "target-000"
        assert first["group"] == "Target"
        assert first["phase"] == "P1"
        assert first["guidance_shown"] == "false"
        # error cells round-trip exactly through repr
        assert float(first["error_e"]) == results[0].state.records[0].error_e

    def test_episode_csv_deterministic_bytes(self, tmp_path, results):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_episode_csv(p1, results)
        write_episode_csv(p2, results)
        assert p1.read_bytes() == p2.read_bytes()

    def test_group_stats_csv(self, tmp_path, results):
        stats = aggregate([session_summary(r.state) for r in results])
        path = tmp_path / "stats.csv"
        write_group_stats_csv(path, stats)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["statistic", "key", "value"]
        assert ["n_subjects", "", "2"] in rows
        keys = {(r[0], r[1]) for r in rows[1:]}
        for label in SLOT_LABELS:
            assert ("episode_mean", label) in keys
        for name in ("improvement", "retention", "generalisation"):
            assert ("delta_mean", name) in keys
            assert ("percent_improvement", name) in keys
