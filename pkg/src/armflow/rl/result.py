"""Training and evaluation artifacts, plus their CSV export formats."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PolicyHandle",
    "CurvePoint",
    "TrainingResult",
    "TrajectoryStep",
    "Trajectory",
    "learning_curve_csv",
    "trajectory_csv",
]


@dataclass(frozen=True)
class PolicyHandle:
    """A trained policy: flat parameters plus an architecture descriptor."""

    arch: str  # e.g. "mlp-tanh-gaussian" or "mlp-tanh-mean"
    obs_dim: int
    act_dim: int
    hidden: tuple[int, ...]
    params: np.ndarray

    def describe(self) -> str:
        sizes = "x".join(str(h) for h in self.hidden) or "linear"
        return f"{self.arch}[{self.obs_dim}->{sizes}->{self.act_dim}]"


@dataclass(frozen=True)
class CurvePoint:
    episode: int
    total_reward: float
    final_distance: float


@dataclass(frozen=True)
class TrainingResult:
    """Outcome of one training run on one robot."""

    curve: tuple[CurvePoint, ...]
    policy: PolicyHandle | None
    success: tuple[bool, ...]
    wall_time: float
    algorithm: str
    seed: int
    deviations: tuple[str, ...] = field(default_factory=tuple)
    failed: bool = False
    diagnostic: str | None = None

    @property
    def all_succeeded(self) -> bool:
        return bool(self.success) and all(self.success)


@dataclass(frozen=True)
class TrajectoryStep:
    time: float
    joint_angles: tuple[float, ...]
    tip_x: float
    tip_y: float
    reward: float


@dataclass(frozen=True)
class Trajectory:
    """One deterministic evaluation episode; row 0 is the reset pose."""

    steps: tuple[TrajectoryStep, ...]
    terminal: str  # "success" | "timeout"
    target_index: int


def _num(value: float) -> str:
    return format(value, ".10g")


def learning_curve_csv(result: TrainingResult) -> str:
    """Curve as CSV: one row per episode actually run."""
    lines = ["episode,total_reward,final_distance"]
    for pt in result.curve:
        lines.append(f"{pt.episode},{_num(pt.total_reward)},{_num(pt.final_distance)}")
    return "\n".join(lines) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    """Trajectory as CSV with columns t, theta_1..theta_n, tip_x, tip_y, reward."""
    n = len(traj.steps[0].joint_angles) if traj.steps else 0
    header = "t," + ",".join(f"theta_{i + 1}" for i in range(n)) + ",tip_x,tip_y,reward"
    lines = [header]
    for step in traj.steps:
        angles = ",".join(_num(a) for a in step.joint_angles)
        lines.append(
            f"{_num(step.time)},{angles},{_num(step.tip_x)},{_num(step.tip_y)},{_num(step.reward)}"
        )
    return "\n".join(lines) + "\n"
