"""Deterministic reference responder standing in for a hosted model.

Given an agent request, it recognizes which pipeline role is being
prompted, resolves the scenario by title (falling back to scanning the
prompt text for geometry), and answers with a well-formed report built
from the exhaustive-search design. It exists so the whole pipeline can
run offline: as a transport for record mode, as the source of the
shipped replay fixtures, and as a predictable provider in tests.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .design import DEFAULT_MARGIN, RobotDesign, design_for_scenario
from .gateway import ChatRequest
from .reports import scan_lengths, scan_points
from .scenarios import Point2, TaskScenario, builtin_scenarios, example_scenario

__all__ = ["StubResponder", "wire_transport"]


def _fmt(v: float) -> str:
    return f"{v:g}"


def _point(p: Point2) -> str:
    return f"({_fmt(p.x)}, {_fmt(p.y)})"


_ENV_PY = '''\
import numpy as np


class ReachEnv:
    """Planar serial-arm reaching with bounded joint velocities."""

    def __init__(self, links, base, targets, dt=0.05, max_steps=100,
                 success_epsilon=0.05, action_limit=1.0):
        self.links = np.asarray(links, dtype=float)
        self.base = np.asarray(base, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        self.dt = dt
        self.max_steps = max_steps
        self.success_epsilon = success_epsilon
        self.action_limit = action_limit

    def _tip(self, theta):
        cum = np.cumsum(theta)
        return self.base + np.array([self.links @ np.cos(cum),
                                     self.links @ np.sin(cum)])

    def _obs(self):
        cum = np.cumsum(self.theta)
        delta = self.targets[self.target] - self._tip(self.theta)
        return np.concatenate([np.sin(cum), np.cos(cum), delta,
                               [np.linalg.norm(delta)]])

    def reset(self, target, rng=None):
        rng = rng or np.random.default_rng()
        self.theta = rng.uniform(-0.05, 0.05, size=self.links.size)
        self.target = target
        self.steps = 0
        return self._obs()

    def step(self, action):
        a = np.clip(action, -self.action_limit, self.action_limit)
        self.theta = self.theta + a * self.dt
        self.steps += 1
        obs = self._obs()
        d = obs[-1]
        reward = -d - 0.01 * float(a @ a) + (10.0 if d < self.success_epsilon else 0.0)
        done = d < self.success_epsilon or self.steps >= self.max_steps
        return obs, reward, done, {"success": d < self.success_epsilon}
'''

_TRAIN_PY = '''\
import numpy as np
from env import ReachEnv
from config import LINKS, BASE, TARGETS, EPISODES, SEED

# Gaussian-policy gradient training with a clipped surrogate objective.
env = ReachEnv(LINKS, BASE, TARGETS)
rng = np.random.default_rng(SEED)
policy = {"w": rng.normal(0, 0.01, (env.links.size, 2 * env.links.size + 3)),
          "b": np.zeros(env.links.size), "log_std": np.full(env.links.size, -0.7)}

def act(obs):
    mu = policy["w"] @ obs + policy["b"]
    return mu + np.exp(policy["log_std"]) * rng.standard_normal(mu.size)

returns = []
for episode in range(EPISODES):
    obs = env.reset(episode % len(TARGETS), rng)
    total, done = 0.0, False
    while not done:
        obs, reward, done, info = env.step(act(obs))
        total += reward
    returns.append(total)
    # policy update happens here (clipped-ratio gradient step)

np.savez("model.npz", **policy)
np.savetxt("learning_curve.csv", np.c_[np.arange(len(returns)), returns],
           delimiter=",", header="episode,total_reward", comments="")
'''

_EVAL_PY = '''\
import numpy as np
from env import ReachEnv
from config import LINKS, BASE, TARGETS

model = np.load("model.npz")
env = ReachEnv(LINKS, BASE, TARGETS)

for target in range(len(TARGETS)):
    obs = env.reset(target)
    env.theta = np.zeros(env.links.size)  # deterministic start
    trace, done = [], False
    while not done:
        action = model["w"] @ obs + model["b"]  # mean action, no noise
        obs, reward, done, info = env.step(action)
        trace.append((env.steps * env.dt, *env.theta, *env._tip(env.theta), reward))
    np.savetxt(f"trajectory_{target}.csv", np.asarray(trace), delimiter=",")
    print(f"target {target}: success={info['success']} steps={env.steps}")
'''


@dataclass
class StubResponder:
    """Produces the reference answer for any pipeline agent request."""

    scenarios: tuple[TaskScenario, ...] = ()
    margin: float = DEFAULT_MARGIN

    def __post_init__(self) -> None:
        if not self.scenarios:
            self.scenarios = (*builtin_scenarios(), example_scenario())

    # -- scenario resolution -------------------------------------------------

    def _resolve(self, text: str) -> TaskScenario | None:
        lowered = text.lower()
        hits = [sc for sc in self.scenarios if sc.title.lower() in lowered]
        if hits:
            return max(hits, key=lambda sc: len(sc.title))
        return self._from_geometry(text)

    def _from_geometry(self, text: str) -> TaskScenario | None:
        """Best-effort scenario from labeled geometry lines in the text."""
        bases: list[Point2] = []
        targets: list[Point2] = []
        links: list[float] = []
        for line in text.splitlines():
            lowered = line.lower()
            if "base" in lowered:
                bases.extend(scan_points(line))
            elif "target" in lowered:
                targets.extend(scan_points(line))
            if "link" in lowered or "arm" in lowered:
                links.extend(scan_lengths(line))
        if not (bases and targets and links):
            return None
        try:
            return TaskScenario(
                id="adhoc",
                title="Ad-hoc Task",
                description=text.strip()[:200] or "ad-hoc task",
                base_options=tuple(dict.fromkeys(bases)),
                targets=tuple(dict.fromkeys(targets)),
                link_options=tuple(dict.fromkeys(links)),
            )
        except ValueError:
            return None

    # -- report synthesis ----------------------------------------------------

    def respond(self, request: ChatRequest) -> str:
        system = request.messages[0].content
        user = request.messages[-1].content
        scenario = self._resolve(user)
        if scenario is None:
            return (
                "I could not identify the task geometry (bases, targets, link "
                "options) in the provided text, so no report can be produced."
            )
        if "Task Analyst" in system:
            return self._analysis_report(scenario)
        if "Robot Designer" in system:
            return self._design_report(scenario)
        if "Reinforcement Learning Designer" in system:
            return self._rl_report(scenario)
        return "Unrecognized request."

    def _design(self, scenario: TaskScenario) -> RobotDesign:
        return design_for_scenario(scenario, self.margin)

    def _analysis_report(self, sc: TaskScenario) -> str:
        design = self._design(sc)
        bases = " or ".join(_point(p) for p in sc.base_options)
        links = ", ".join(f"{_fmt(v)} m" for v in sc.link_options)
        targets = ", ".join(_point(p) for p in sc.targets)
        return f"""# Task Analysis Report

Task: {sc.title}. All positions below use one planar frame in meters, origin at the stated coordinates.

## 1. Number of Targets to be Reached

{len(sc.targets)}

## 2. Number of Robots to be Built

{len(design.robots)}

## 3. Base Location Options

{bases}

## 4. Arm Link Length Options

{links} (kept exactly as stated)

## 5. Arm Choices Information

The arms are serial chains of up to {sc.max_links_per_robot} links; catalogue lengths may repeat. Target coordinates in the working frame: {targets}. Reaches must hold with a modest safety margin, and shorter assemblies are preferred at equal coverage.
"""

    def _design_report(self, sc: TaskScenario) -> str:
        design = self._design(sc)
        base_lines = "\n".join(
            f"- Robot {i + 1}: base {_point(p.config.base)}"
            for i, p in enumerate(design.robots)
        )
        config_lines = "\n".join(
            "- Robot {}: base {}, links {}".format(
                i + 1,
                _point(p.config.base),
                " + ".join(f"{_fmt(l)} m" for l in p.config.links),
            )
            for i, p in enumerate(design.robots)
        )
        assignment = "; ".join(
            f"robot {i + 1} covers targets "
            + ", ".join(_point(design.targets[t]) for t in p.target_indices)
            for i, p in enumerate(design.robots)
        )
        return f"""# Robot Design Report

Task: {sc.title}.

## 1. Required Number of Robots

{len(design.robots)}

## 2. Selected Base Location

{base_lines}

## 3. Design Decisions for Robotic Arms

Candidate link combinations from the catalogue were checked against every assigned target's distance band. The selection below is the cheapest combination that reaches all assigned targets with a 5% reach margin, so the arms are neither excessively long nor insufficiently short. Sub-task allocation: {assignment}.

## 4. Final Robotic Arm Configuration

{config_lines}

## 5. Summary

{len(design.robots)} robot(s) with a total link length of {_fmt(design.total_cost)} m cover all {len(design.targets)} targets. The configuration minimizes material cost while keeping every reach inside the safe band.
"""

    def _rl_report(self, sc: TaskScenario) -> str:
        design = self._design(sc)
        eps = max(0.05, round(0.02 * max(sum(p.config.links) for p in design.robots), 3))
        return f"""# RL Design Report

Task: {sc.title}.

## 1. Environment Design

A goal-conditioned planar reaching environment per robot. The observation packs sin/cos of each cumulative joint angle, the tip-to-target delta (dx, dy), and the scalar distance. One policy serves all assigned targets; the active target is cycled per episode.

## 2. Motor Motion Definition

Actions are joint angular velocities in rad/s, clamped to 1.0 rad/s per joint and integrated over dt = 0.05 s. No joint limits are imposed.

## 3. Reinforcement Learning Algorithm Selection

Algorithm: PPO. The action space is continuous and low-dimensional and the reward is dense, which suits an on-policy clipped-surrogate method; it is stable without replay buffers and trains within a small episode budget.

## 4. Success and Failure Criteria

An episode succeeds when the tip comes within {_fmt(eps)} m of the active target; it fails by timeout after 100 steps. The run succeeds when the deterministic policy reaches every assigned target.

## 5. Initial Conditions

Joints start at the zero pose plus uniform noise of 0.05 rad per joint; evaluation uses the exact zero pose.

**env.py**

```python name=env.py
{_ENV_PY}```

**train.py**

```python name=train.py
{_TRAIN_PY}```

**eval.py**

```python name=eval.py
{_EVAL_PY}```

Machine-readable run parameters:

```rlspec
algorithm: PPO
episodes: 300
max_steps: 100
dt: 0.05
success_epsilon: {_fmt(eps)}
action_limit: 1.0
reward_weights: 1.0, 0.01, 10.0
seed: 7
```
"""


def wire_transport(responder: StubResponder | None = None):
    """A Gateway transport serving stub completions (for record mode/tests)."""
    responder = responder or StubResponder()

    def transport(url: str, headers: dict, body: bytes, timeout: float):
        doc = json.loads(body.decode("utf-8"))
        request = ChatRequest(
            model_id=doc["model"],
            messages=tuple(
                __import__("armflow.gateway", fromlist=["ChatMessage"]).ChatMessage(
                    m["role"], m["content"]
                )
                for m in doc["messages"]
            ),
            temperature=doc.get("temperature", 0.2),
            max_tokens=doc.get("max_tokens", 4096),
        )
        content = responder.respond(request)
        payload = {
            "model": doc["model"],
            "choices": [{"message": {"role": "assistant", "content": content}}],
            "usage": {
                "prompt_tokens": sum(len(m["content"].split()) for m in doc["messages"]),
                "completion_tokens": len(content.split()),
            },
        }
        return 200, json.dumps(payload).encode("utf-8")

    return transport
