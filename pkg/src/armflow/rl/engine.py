"""Entry points of the native RL engine: train, evaluate, export.

``train`` dispatches on the spec's algorithm: the clipped-surrogate
trainer runs PPO (and stands in for SAC or unrecognized choices, with a
recorded deviation), the cross-entropy trainer runs CEM. ``evaluate``
replays a trained policy deterministically (mean action, zero-noise
reset) and returns the tip trajectory.
"""

from __future__ import annotations

import numpy as np

from . import nets
from .env import env_reset, env_step, observe
from .result import PolicyHandle, Trajectory, TrajectoryStep, TrainingResult
from .rlspec import RLSpec

__all__ = ["train", "evaluate", "evaluate_success", "policy_action"]


def train(spec: RLSpec) -> TrainingResult:
    """Train per the spec's algorithm choice; never raises on divergence."""
    from .cem import train_cem
    from .ppo import train_ppo

    kind = spec.algorithm.kind
    if kind == "cem":
        return train_cem(spec)
    result = train_ppo(spec)
    if kind == "other":
        extra = (
            f"declared algorithm {spec.algorithm.detail or 'unknown'!r} "
            "executed by the native PPO trainer"
        )
        result = TrainingResult(
            curve=result.curve,
            policy=result.policy,
            success=result.success,
            wall_time=result.wall_time,
            algorithm=result.algorithm,
            seed=result.seed,
            deviations=(*result.deviations, extra),
            failed=result.failed,
            diagnostic=result.diagnostic,
        )
    return result


def policy_action(handle: PolicyHandle, obs: np.ndarray) -> np.ndarray:
    """Deterministic (mean) action of a trained policy for one observation."""
    extra = handle.act_dim if handle.arch.endswith("gaussian") else 0
    ws, bs, _ = nets.unpack(
        handle.params, handle.obs_dim, handle.hidden, handle.act_dim, extra=extra
    )
    mu, _ = nets.forward(ws, bs, obs[None, :])
    return mu[0]


def evaluate(handle: PolicyHandle, spec: RLSpec, target_index: int) -> Trajectory:
    """One deterministic episode; row 0 of the trajectory is the reset pose."""
    if handle.obs_dim != spec.obs_dim or handle.act_dim != spec.n_joints:
        raise ValueError(
            f"policy was trained for obs/act dims ({handle.obs_dim}, {handle.act_dim}), "
            f"spec needs ({spec.obs_dim}, {spec.n_joints})"
        )
    state, obs = env_reset(spec, target_index, noise=0.0)
    links = np.asarray(spec.links, dtype=float)
    steps = [_step_row(0.0, state.joint_angles, links, spec, 0.0)]
    terminal: str | None = None
    while terminal is None:
        action = policy_action(handle, obs)
        state, obs, reward, terminal = env_step(state, action, spec)
        steps.append(
            _step_row(state.step_count * spec.dt, state.joint_angles, links, spec, reward)
        )
    return Trajectory(steps=tuple(steps), terminal=terminal, target_index=target_index)


def _step_row(t: float, angles: np.ndarray, links: np.ndarray, spec: RLSpec, reward: float):
    cum = np.cumsum(angles)
    tip_x = spec.base.x + float(np.dot(links, np.cos(cum)))
    tip_y = spec.base.y + float(np.dot(links, np.sin(cum)))
    return TrajectoryStep(
        time=t,
        joint_angles=tuple(float(a) for a in angles),
        tip_x=tip_x,
        tip_y=tip_y,
        reward=reward,
    )


def evaluate_success(handle: PolicyHandle, spec: RLSpec) -> tuple[bool, ...]:
    """Per-target success flags of the deterministic policy."""
    return tuple(
        evaluate(handle, spec, k).terminal == "success" for k in range(len(spec.targets))
    )
