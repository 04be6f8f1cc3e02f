"""teachsim: a simulator and experiment harness for teaching robot motor
skills by demonstration, with guidance derived from a teaching-risk bound.

The package covers the full loop: linear skill policies over fixed feature
maps, a closed-form ridge learner, query-state selection, two simulated
robot embodiments, post-demonstration guidance, the five-phase teaching
protocol, synthetic teachers for batch experiments, statistics, durable
session logs, and a JSON/WebSocket session server with a CLI.
"""

from .analysis import (
    EPISODE_CSV_COLUMNS,
    SLOT_LABELS,
    GroupStats,
    aggregate,
    regularized_incomplete_beta,
    welch_t_test,
    write_episode_csv,
    write_group_stats_csv,
)
from .dynamics import (
    DEFAULT_KINEMATIC_REPLAY_STEPS,
    DEFAULT_SIM_REPLAY_SECONDS,
    KINEMATIC_STEP_SECONDS,
    REPLAY_SAMPLE_HZ,
    SIM_ACTION_FORCE_CAP,
    ArmModel,
    JointState,
    KinematicModel,
    Trajectory,
    forward_kinematics,
    gravity_vector,
    inverse_kinematics,
    jacobian,
    mass_matrix,
    coriolis_matrix,
    potential_energy,
    rollout,
    step,
    total_energy,
)
from .errors import (
    GenerationExhaustedError,
    InvalidInputError,
    LogParseError,
    ProtocolOrderError,
    RankDeficiencyError,
    TeachSimError,
    UnknownSkillError,
    UnsupportedVersionError,
    WorkspaceError,
)
from .guidance import GuidanceFrame, GuidanceRecord, build_guidance
from .learner import (
    DEFAULT_LAMBDA,
    DemonstrationSet,
    LearnerConfig,
    fit,
    residual_norms,
    risk_factor_R1,
    risk_factor_R2,
    teaching_risk,
)
from .persistence import (
    FORMAT_VERSION,
    ExperimentConfig,
    ReplayReport,
    SessionLog,
    load_experiment_config,
    load_session,
    replay_verify,
    save_experiment_config,
    save_session,
    session_log,
)
from .protocol import (
    EMBODIMENT_INFO,
    EMBODIMENTS,
    EPISODES_PER_SESSION,
    GROUPS,
    PHASE_PLAN,
    EpisodeRecord,
    SessionConfig,
    SessionState,
    acknowledge_replay,
    begin_session,
    session_summary,
    submit_demonstration,
)
from .queries import QueryBatch, feature_matrix, generate_query_states, phase_seed
from .skills import (
    FEATURE_MAPS,
    FORCE_CONTROL_5,
    KINEMATIC_3,
    KINEMATIC_ACTION_CAP,
    KINEMATIC_WORKSPACE,
    SIM_ACTION_CAP,
    SIM_WORKSPACE,
    FeatureMap,
    Skill,
    SkillParameters,
    TaskSpaceState,
    Workspace,
    builtin_skills,
    clip_action,
    eval_features,
    get_skill,
    optimal_action,
    policy_action,
    unvec,
    vec,
)
from .teachers import (
    DEFAULT_ADAPT_RATE,
    GAIN_RANGE,
    NOISE_SIGMA_FACTOR,
    SUBJECT_SEED_STRIDE,
    SessionResult,
    TeacherModel,
    novice_teacher,
    oracle_teacher,
    run_group,
    run_session,
    teacher_act,
    teacher_update,
)

__version__ = "0.1.0"
