"""Native RL engine: planar-arm reaching environment plus two trainers."""

from .cem import train_cem
from .engine import evaluate, evaluate_success, train
from .env import EnvState, env_reset, env_step, observe
from .ppo import gradient_check, train_ppo
from .result import (
    CurvePoint,
    PolicyHandle,
    TrainingResult,
    Trajectory,
    TrajectoryStep,
    learning_curve_csv,
    trajectory_csv,
)
from .rlspec import (
    DEFAULTS,
    HIDDEN_SIZES,
    Algorithm,
    RLSpec,
    RLSpecConsistencyError,
    RLSpecError,
    RLSpecFormatError,
    RLSpecMissingError,
    parse_rlspec,
    spec_for_design,
)

__all__ = [
    "Algorithm",
    "CurvePoint",
    "DEFAULTS",
    "EnvState",
    "HIDDEN_SIZES",
    "PolicyHandle",
    "RLSpec",
    "RLSpecConsistencyError",
    "RLSpecError",
    "RLSpecFormatError",
    "RLSpecMissingError",
    "TrainingResult",
    "Trajectory",
    "TrajectoryStep",
    "env_reset",
    "env_step",
    "evaluate",
    "evaluate_success",
    "gradient_check",
    "learning_curve_csv",
    "observe",
    "parse_rlspec",
    "spec_for_design",
    "train",
    "train_cem",
    "train_ppo",
    "trajectory_csv",
]
