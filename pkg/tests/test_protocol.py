import numpy as np
import pytest

from teachsim import (
    EPISODES_PER_SESSION,
    InvalidInputError,
    ProtocolOrderError,
    SessionConfig,
    UnknownSkillError,
    acknowledge_replay,
    begin_session,
    optimal_action,
    session_summary,
    submit_demonstration,
)

EXPECTED_PLAN = (
    [("P1", 1, "skill1")]
    + [("P2", 1, "skill2")]
    + [("P3", i, "skill1") for i in range(1, 9)]
    + [("P4", 1, "skill1")]
    + [("P5", 1, "skill2")]
)


def run_full_session(cfg, act=None):
    """Drive a session to completion, returning its final state."""
    state = begin_session(cfg)
    while state.status != "Finished":
        while state.status in ("AwaitingAction", "ShowingGuidance"):
            skill = state.current_skill
            query = state.current_batch.states[state.demo_index]
            u = optimal_action(skill, query) if act is None else act(skill, query)
            state, _ = submit_demonstration(state, u)
        state = acknowledge_replay(state)
    return state


class TestPlan:
    def test_session_has_twelve_episodes(self):
        assert EPISODES_PER_SESSION == 12

    @pytest.mark.parametrize("embodiment", ["SimArm", "KinematicArm"])
    def test_episode_order_and_skills(self, embodiment):
        cfg = SessionConfig(group="Control", embodiment=embodiment, seed=41)
        state = run_full_session(cfg)
        assert len(state.records) == 12
        skill_ids = {"skill1": cfg.skill1_id, "skill2": cfg.skill2_id}
        for rec, (phase, ep, slot) in zip(state.records, EXPECTED_PLAN):
            assert rec.phase == phase
            assert rec.episode_index == ep
            assert rec.skill_id == skill_ids[slot]

    def test_default_skills_per_embodiment(self):
        sim = SessionConfig(group="Target", embodiment="SimArm", seed=1)
        assert (sim.skill1_id, sim.skill2_id) == ("sim-s1", "sim-s2")
        kin = SessionConfig(group="Target", embodiment="KinematicArm", seed=1)
        assert (kin.skill1_id, kin.skill2_id) == ("phys-s1", "phys-s2")

    def test_mismatched_skill_embodiment_rejected(self):
        cfg = SessionConfig(group="Target", embodiment="SimArm", seed=1,
                            skill1_id="phys-s1")
        with pytest.raises(UnknownSkillError):
            begin_session(cfg)

    def test_bad_group_rejected(self):
        with pytest.raises(InvalidInputError):
            SessionConfig(group="Placebo", embodiment="SimArm", seed=1)


class TestGuidanceGating:
    def test_target_gets_guidance_only_in_p3(self):
        cfg = SessionConfig(group="Target", embodiment="SimArm", seed=7)
        state = begin_session(cfg)
        seen = []
        while state.status != "Finished":
            while state.status in ("AwaitingAction", "ShowingGuidance"):
                u = optimal_action(state.current_skill,
                                   state.current_batch.states[state.demo_index])
                phase = state.phase
                state, frame = submit_demonstration(state, u)
                seen.append((phase, frame is not None))
            state = acknowledge_replay(state)
        for phase, got_frame in seen:
            assert got_frame == (phase == "P3")

    def test_control_never_gets_guidance(self):
        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=7)
        state = begin_session(cfg)
        while state.status != "Finished":
            while state.status in ("AwaitingAction", "ShowingGuidance"):
                u = optimal_action(state.current_skill,
                                   state.current_batch.states[state.demo_index])
                state, frame = submit_demonstration(state, u)
                assert frame is None
            state = acknowledge_replay(state)

    def test_guidance_shown_flag_on_records(self):
        for group in ("Target", "Control"):
            cfg = SessionConfig(group=group, embodiment="SimArm", seed=7)
            state = run_full_session(cfg)
            for rec in state.records:
                assert rec.guidance_shown == (group == "Target" and rec.phase == "P3")

    def test_guidance_frame_grows_within_episode(self):
        """In Target P3 the frame covers every submission so far."""
        cfg = SessionConfig(group="Target", embodiment="SimArm", seed=7)
        state = begin_session(cfg)
        # fast-forward P1 and P2
        while state.phase != "P3":
            while state.status in ("AwaitingAction", "ShowingGuidance"):
                u = optimal_action(state.current_skill,
                                   state.current_batch.states[state.demo_index])
                state, _ = submit_demonstration(state, u)
            state = acknowledge_replay(state)
        for k in range(state.effort_budget):
            u = optimal_action(state.current_skill, state.current_batch.states[k])
            state, frame = submit_demonstration(state, u)
            assert frame.effort_used == k + 1
            assert frame.effort_budget == 5


class TestTransitions:
    def test_submit_rejected_during_replay(self):
        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=3)
        state = begin_session(cfg)
        for k in range(state.effort_budget):
            u = optimal_action(state.current_skill, state.current_batch.states[k])
            state, _ = submit_demonstration(state, u)
        assert state.status == "ShowingReplay"
        with pytest.raises(ProtocolOrderError):
            submit_demonstration(state, np.zeros(2))

    def test_acknowledge_rejected_while_awaiting(self):
        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=3)
        state = begin_session(cfg)
        with pytest.raises(ProtocolOrderError):
            acknowledge_replay(state)

    def test_submit_accepted_while_guidance_on_screen(self):
        """A new action dismisses the on-screen guidance frame."""
        cfg = SessionConfig(group="Target", embodiment="SimArm", seed=3)
        state = begin_session(cfg)
        while state.phase != "P3":
            while state.status in ("AwaitingAction", "ShowingGuidance"):
                u = optimal_action(state.current_skill,
                                   state.current_batch.states[state.demo_index])
                state, _ = submit_demonstration(state, u)
            state = acknowledge_replay(state)
        u = optimal_action(state.current_skill, state.current_batch.states[0])
        state, frame = submit_demonstration(state, u)
        assert state.status == "ShowingGuidance" and frame is not None
        u = optimal_action(state.current_skill, state.current_batch.states[1])
        state, frame = submit_demonstration(state, u)
        assert frame is not None

    def test_finished_session_rejects_everything(self):
        cfg = SessionConfig(group="Control", embodiment="KinematicArm", seed=3)
        state = run_full_session(cfg)
        assert state.status == "Finished"
        with pytest.raises(ProtocolOrderError):
            submit_demonstration(state, np.zeros(2))
        with pytest.raises(ProtocolOrderError):
            acknowledge_replay(state)

    def test_non_finite_action_rejected(self):
        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=3)
        state = begin_session(cfg)
        with pytest.raises(InvalidInputError):
            submit_demonstration(state, np.array([np.nan, 0.0]))
        with pytest.raises(InvalidInputError):
            submit_demonstration(state, np.array([1.0, 2.0, 3.0]))

    def test_actions_clipped_to_embodiment_cap(self):
        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=3)
        state = begin_session(cfg)
        state, _ = submit_demonstration(state, np.array([300.0, 400.0]))
        assert np.linalg.norm(state.submitted[0]) == pytest.approx(20.0)


class TestOutcomes:
    def test_perfect_teacher_reaches_near_zero_error(self):
        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=13)
        state = run_full_session(cfg)
        for phase, ep, err in session_summary(state):
            assert err < 1e-4, (phase, ep, err)

    def test_noisy_actions_leave_error(self):
        rng = np.random.default_rng(0)

        def noisy(skill, query):
            return optimal_action(skill, query) + rng.normal(scale=0.5, size=2)

        cfg = SessionConfig(group="Control", embodiment="SimArm", seed=13)
        state = run_full_session(cfg, act=noisy)
        errs = [e for _, _, e in session_summary(state)]
        assert min(errs) > 1e-3

    def test_summary_matches_records(self):
        cfg = SessionConfig(group="Control", embodiment="KinematicArm", seed=9)
        state = run_full_session(cfg)
        rows = session_summary(state)
        assert len(rows) == 12
        for rec, (phase, ep, err) in zip(state.records, rows):
            assert (rec.phase, rec.episode_index, rec.error_e) == (phase, ep, err)

    def test_effort_budget_tracks_feature_dim(self):
        sim = begin_session(SessionConfig(group="Control", embodiment="SimArm", seed=1))
        kin = begin_session(
            SessionConfig(group="Control", embodiment="KinematicArm", seed=1))
        assert sim.effort_budget == 5
        assert kin.effort_budget == 3

    def test_deterministic_batches_given_seed(self):
        a = begin_session(SessionConfig(group="Control", embodiment="SimArm", seed=21))
        b = begin_session(SessionConfig(group="Control", embodiment="SimArm", seed=21))
        for sa, sb in zip(a.current_batch.states, b.current_batch.states):
            np.testing.assert_array_equal(sa.position, sb.position)
            np.testing.assert_array_equal(sa.velocity, sb.velocity)
