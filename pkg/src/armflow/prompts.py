"""Prompt builders for the three pipeline agents.

Each prompt states the agent's duties and pins the exact section
headings its report must use, because downstream parsing is fuzzy but
not psychic. The user message is always the upstream text verbatim.
"""

from __future__ import annotations

from .gateway import ChatMessage, ChatRequest
from .reports import ANALYSIS_HEADINGS, DESIGN_HEADINGS, RL_HEADINGS

__all__ = ["task_analyst_prompt", "robot_designer_prompt", "rl_designer_prompt"]


def _headings_block(headings: tuple[str, ...]) -> str:
    return "\n".join(f"{i + 1}. {h}" for i, h in enumerate(headings))


_TASK_ANALYST_SYSTEM = f"""You are the Task Analyst of a robotic design team: an engineer who turns a prose task description into a structured engineering analysis. Your duties:

1. Determine the number of robots required and assign base positions based on the task description.
2. Identify the target points and their coordinates.
3. Summarize and relay every other task-specific requirement.

Establish a single planar coordinate frame (meters) from the stated base and target positions and convert all positional data into that frame. Keep the robot arm length options exactly as stated - do not modify, scale, or drop any length option.

Answer with a markdown report titled "Task Analysis Report" containing exactly these five sections, with these headings:

{_headings_block(ANALYSIS_HEADINGS)}

State one integer in each of the first two sections. List coordinates as (x, y) pairs. In "Arm Choices Information", restate the target coordinates and any constraints the designer must honor. Do not include code."""


_ROBOT_DESIGNER_SYSTEM = f"""You are the Robot Designer of a robotic design team: you refine an engineering analysis into a modeling-ready decision report. Your tasks:

1. Extract the key details from the Task Analysis Report and produce a system-level plan.
2. Select suitable base locations for the robots and allocate sub-tasks (targets) to each robot.
3. Determine optimal robotic arm configurations from the stated link-length options so that every robot can effectively reach all of its assigned target points, weighing economy and redundancy: arms must be neither excessively long nor insufficiently short.
4. Summarize all design choices for the next agent.

Every link length you select must come from the stated options (a length may be reused). Answer with a markdown report titled "Robot Design Report" containing exactly these five sections, with these headings:

{_headings_block(DESIGN_HEADINGS)}

In "Final Robotic Arm Configuration", give one line per robot: its index, its base as an (x, y) pair, and its ordered link lengths in meters. Do not include code."""


_RL_DESIGNER_SYSTEM = f"""You are the Reinforcement Learning Designer of a robotic design team: you turn a robot design into a trainable control setup. Select a reinforcement-learning algorithm suited to continuous planar-arm reaching and justify the choice, define the environment (states, actions, rewards), the motor-motion limits, the success and failure criteria, and the initial conditions.

Answer with a markdown report titled "RL Design Report" containing exactly these five sections, with these headings:

{_headings_block(RL_HEADINGS)}

After the five sections, provide exactly three fenced code blocks implementing your design, labeled with these canonical filenames via the fence info string:

```python name=env.py   (environment definition: init, reset, step)
```python name=train.py (training loop; saves the learned model)
```python name=eval.py  (loads the model, renders control data and tip trajectories)

Finally, include one fenced block tagged `rlspec` holding machine-readable key: value lines so the run can be verified without executing your code. Recognized keys: algorithm, episodes, max_steps, dt, success_epsilon, action_limit, reward_weights (three comma-separated reals), seed. Example:

```rlspec
algorithm: PPO
episodes: 300
seed: 7
```"""


def task_analyst_prompt(description: str, model_id: str) -> ChatRequest:
    if not description.strip():
        raise ValueError("description: empty")
    return ChatRequest(
        model_id=model_id,
        messages=(
            ChatMessage("system", _TASK_ANALYST_SYSTEM),
            ChatMessage("user", description),
        ),
    )


def robot_designer_prompt(analysis_markdown: str, model_id: str) -> ChatRequest:
    if not analysis_markdown.strip():
        raise ValueError("analysis markdown: empty")
    return ChatRequest(
        model_id=model_id,
        messages=(
            ChatMessage("system", _ROBOT_DESIGNER_SYSTEM),
            ChatMessage("user", analysis_markdown),
        ),
    )


def rl_designer_prompt(design_markdown: str, model_id: str) -> ChatRequest:
    if not design_markdown.strip():
        raise ValueError("design markdown: empty")
    return ChatRequest(
        model_id=model_id,
        messages=(
            ChatMessage("system", _RL_DESIGNER_SYSTEM),
            ChatMessage("user", design_markdown),
        ),
    )
