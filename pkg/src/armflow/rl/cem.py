"""Cross-entropy method: derivative-free search over policy parameters.

Each generation samples a population of deterministic mean-action
policies from a diagonal Gaussian over the flat parameter vector,
scores every member by its summed episode reward across all targets,
and refits the Gaussian to the elite fraction. The spec's ``episodes``
budget is interpreted as the generation budget, and the search stops
early once the distribution mean solves every target.
"""

from __future__ import annotations

import time

import numpy as np

from . import nets
from .env import env_reset, env_step
from .result import CurvePoint, PolicyHandle, TrainingResult
from .rlspec import RLSpec

__all__ = ["train_cem", "POPULATION", "ELITE_FRAC", "CEM_HIDDEN"]

POPULATION = 32
ELITE_FRAC = 0.25
INIT_STD = 1.0  # wide first generation; the elite refit shrinks it fast
STD_FLOOR = 0.02
CEM_HIDDEN: tuple[int, ...] = (16,)


def _episode(params, spec, target, obs_dim, act_dim, hidden):
    """Deterministic episode; returns (total reward, final distance)."""
    ws, bs, _ = nets.unpack(params, obs_dim, hidden, act_dim)
    state, obs = env_reset(spec, target, noise=0.0)
    total = 0.0
    while True:
        mu, _ = nets.forward(ws, bs, obs[None, :])
        state, obs, reward, terminal = env_step(state, mu[0], spec)
        total += reward
        if terminal is not None:
            return total, float(obs[-1]), terminal


def _score(params, spec, obs_dim, act_dim, hidden):
    totals, finals, oks = [], [], []
    for target in range(len(spec.targets)):
        total, final_d, terminal = _episode(params, spec, target, obs_dim, act_dim, hidden)
        totals.append(total)
        finals.append(final_d)
        oks.append(terminal == "success")
    return float(np.sum(totals)), float(np.mean(finals)), all(oks)


def train_cem(spec: RLSpec, hidden: tuple[int, ...] = CEM_HIDDEN) -> TrainingResult:
    """Run CEM for up to ``spec.episodes`` generations (early-stopping).

    Curve points record, per generation, the distribution mean's summed
    reward over targets and its mean final distance.
    """
    from .engine import evaluate_success

    start = time.perf_counter()
    rng = np.random.default_rng(spec.seed)
    obs_dim, act_dim = spec.obs_dim, spec.n_joints
    n_elite = max(1, int(round(POPULATION * ELITE_FRAC)))

    mean = nets.init_params(rng, obs_dim, hidden, act_dim)
    std = np.full(mean.size, INIT_STD)
    curve: list[CurvePoint] = []

    for gen in range(spec.episodes):
        samples = mean[None, :] + std[None, :] * rng.standard_normal((POPULATION, mean.size))
        fitness = np.empty(POPULATION)
        for i in range(POPULATION):
            fitness[i], _, _ = _score(samples[i], spec, obs_dim, act_dim, hidden)
        elite_idx = np.argsort(fitness)[-n_elite:]
        elites = samples[elite_idx]
        mean = elites.mean(axis=0)
        std = np.maximum(elites.std(axis=0), STD_FLOOR)

        total, final_d, solved = _score(mean, spec, obs_dim, act_dim, hidden)
        curve.append(CurvePoint(gen, total, final_d))
        if not np.all(np.isfinite(mean)):
            return TrainingResult(
                curve=tuple(curve),
                policy=None,
                success=tuple([False] * len(spec.targets)),
                wall_time=time.perf_counter() - start,
                algorithm="cem",
                seed=spec.seed,
                failed=True,
                diagnostic=f"non-finite parameters at generation {gen}",
            )
        if solved:
            break

    handle = PolicyHandle(
        arch="mlp-tanh-mean", obs_dim=obs_dim, act_dim=act_dim, hidden=hidden, params=mean
    )
    return TrainingResult(
        curve=tuple(curve),
        policy=handle,
        success=evaluate_success(handle, spec),
        wall_time=time.perf_counter() - start,
        algorithm="cem",
        seed=spec.seed,
    )
