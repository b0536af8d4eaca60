"""Goal-conditioned reaching environment for a planar serial arm.

State is the joint-angle vector plus the index of the target being
chased. Actions are joint velocities (rad/s), clamped to the spec's
limit and integrated for one dt. The observation packs, in order,
``sin`` of each cumulative joint angle, ``cos`` of each, the tip-to-
target delta (dx, dy), and the scalar distance.

Reward per step:

    -w_d * d'  -  w_a * ||a_clamped||^2  +  bonus * [d' < epsilon]

where d' is the post-step tip distance. An episode ends in "success"
as soon as the tip enters the epsilon ball, or in "timeout" when the
step budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..kinematics import tip_position
from .rlspec import RLSpec

__all__ = ["EnvState", "env_reset", "env_step", "observe", "RESET_NOISE"]

# Uniform joint-angle noise (rad) applied around the zero pose on reset.
RESET_NOISE = 0.05

SUCCESS = "success"
TIMEOUT = "timeout"


@dataclass
class EnvState:
    joint_angles: np.ndarray
    active_target_index: int
    step_count: int


def _links(spec: RLSpec) -> np.ndarray:
    return np.asarray(spec.links, dtype=float)


def observe(spec: RLSpec, state: EnvState) -> np.ndarray:
    """Observation vector [sin(cum), cos(cum), dx, dy, distance]."""
    cum = np.cumsum(state.joint_angles)
    links = _links(spec)
    tx, ty = spec.targets[state.active_target_index].as_tuple()
    tip_x = spec.base.x + float(np.dot(links, np.cos(cum)))
    tip_y = spec.base.y + float(np.dot(links, np.sin(cum)))
    dx, dy = tx - tip_x, ty - tip_y
    return np.concatenate([np.sin(cum), np.cos(cum), [dx, dy, float(np.hypot(dx, dy))]])


def env_reset(
    spec: RLSpec,
    target_index: int,
    rng: "np.random.Generator | int | None" = None,
    noise: float = RESET_NOISE,
) -> tuple[EnvState, np.ndarray]:
    """Start an episode near the zero pose, chasing the given target."""
    if not 0 <= target_index < len(spec.targets):
        raise ValueError(f"target_index {target_index} out of range")
    n = spec.n_joints
    if noise > 0:
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        angles = gen.uniform(-noise, noise, size=n)
    else:
        angles = np.zeros(n)
    state = EnvState(joint_angles=angles, active_target_index=target_index, step_count=0)
    return state, observe(spec, state)


def env_step(
    state: EnvState, action: np.ndarray, spec: RLSpec
) -> tuple[EnvState, np.ndarray, float, "str | None"]:
    """Integrate one control step; returns (state', obs, reward, terminal).

    ``terminal`` is None while the episode continues, else "success" or
    "timeout".
    """
    action = np.asarray(action, dtype=float)
    if action.shape != (spec.n_joints,):
        raise ValueError(
            f"action shape {action.shape}, expected ({spec.n_joints},)"
        )
    clamped = np.clip(action, -spec.action_limit, spec.action_limit)
    new_angles = state.joint_angles + clamped * spec.dt
    new_state = EnvState(
        joint_angles=new_angles,
        active_target_index=state.active_target_index,
        step_count=state.step_count + 1,
    )
    obs = observe(spec, new_state)
    distance = float(obs[-1])

    w_d, w_a, bonus = spec.reward_weights
    success = distance < spec.success_epsilon
    reward = -w_d * distance - w_a * float(np.dot(clamped, clamped))
    if success:
        reward += bonus

    terminal: str | None = None
    if success:
        terminal = SUCCESS
    elif new_state.step_count >= spec.max_steps_per_episode:
        terminal = TIMEOUT
    return new_state, obs, reward, terminal
