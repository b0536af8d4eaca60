"""Machine-readable training spec parsed from an RL design report.

The report must carry a fenced block tagged ``rlspec`` of ``key: value``
lines. Scalar knobs missing from the block fall back to fixed defaults;
geometry (links, base, targets) always comes from the verified robot
design, and any geometry the block does state is cross-checked against
it. Example block::

    ```rlspec
    algorithm: PPO
    episodes: 300
    max_steps: 100
    dt: 0.05
    success_epsilon: 0.05
    action_limit: 1.0
    reward_weights: 1.0, 0.01, 10.0
    seed: 7
    ```
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..scenarios import Point2

__all__ = [
    "RLSpec",
    "Algorithm",
    "RLSpecError",
    "RLSpecMissingError",
    "RLSpecFormatError",
    "RLSpecConsistencyError",
    "DEFAULTS",
    "HIDDEN_SIZES",
    "parse_rlspec",
    "spec_for_design",
]


class RLSpecError(ValueError):
    """Base class for rlspec problems."""


class RLSpecMissingError(RLSpecError):
    """The report carries no rlspec block."""


class RLSpecFormatError(RLSpecError):
    """An rlspec block exists but a line or value is malformed."""


class RLSpecConsistencyError(RLSpecError):
    """Block geometry contradicts the robot design; names the fields."""

    def __init__(self, fields: list[str], message: str):
        super().__init__(message)
        self.fields = fields


@dataclass(frozen=True)
class Algorithm:
    """Algorithm choice; ``other`` keeps the verbatim text."""

    kind: str  # "ppo" | "sac" | "cem" | "other"
    detail: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("ppo", "sac", "cem", "other"):
            raise ValueError(f"algorithm kind {self.kind!r}")

    @classmethod
    def from_text(cls, text: str) -> "Algorithm":
        token = text.strip()
        lowered = token.lower()
        if "ppo" in lowered or "proximal policy" in lowered:
            return cls("ppo")
        if "sac" in lowered or "soft actor" in lowered:
            return cls("sac")
        if "cem" in lowered or "cross entropy" in lowered or "cross-entropy" in lowered:
            return cls("cem")
        return cls("other", token)


# Fixed fallbacks for knobs the block leaves out: step time, horizon,
# success radius, joint-speed bound, (distance, action, bonus) weights,
# episode budget, seed.
DEFAULTS = {
    "dt": 0.05,
    "max_steps": 100,
    "success_epsilon": 0.05,
    "action_limit": 1.0,
    "reward_weights": (1.0, 0.01, 10.0),
    "episodes": 300,
    "seed": 0,
}

# Policy/value network width used by both trainers.
HIDDEN_SIZES = (32, 32)


@dataclass(frozen=True)
class RLSpec:
    """Everything one training run needs, geometry included."""

    algorithm: Algorithm
    links: tuple[float, ...]
    base: Point2
    targets: tuple[Point2, ...]
    dt: float
    max_steps_per_episode: int
    success_epsilon: float
    action_limit: float
    reward_weights: tuple[float, float, float]
    episodes: int
    seed: int

    def __post_init__(self) -> None:
        if not self.links or any(l <= 0 or not math.isfinite(l) for l in self.links):
            raise ValueError("links: must be non-empty and > 0")
        if not self.targets:
            raise ValueError("targets: empty")
        if self.dt <= 0:
            raise ValueError("dt: must be > 0")
        if self.max_steps_per_episode < 1:
            raise ValueError("max_steps: must be >= 1")
        if self.success_epsilon <= 0:
            raise ValueError("success_epsilon: must be > 0")
        if self.action_limit <= 0:
            raise ValueError("action_limit: must be > 0")
        if self.episodes < 0:
            raise ValueError("episodes: must be >= 0")

    @property
    def n_joints(self) -> int:
        return len(self.links)

    @property
    def obs_dim(self) -> int:
        return 2 * self.n_joints + 3

    def with_targets(self, targets: tuple[Point2, ...]) -> "RLSpec":
        from dataclasses import replace

        return replace(self, targets=targets)


_FENCE_RE = re.compile(
    r"^(?P<fence>```+|~~~+)[ \t]*rlspec[^\n]*\n(?P<body>.*?)^(?P=fence)[ \t]*$",
    re.MULTILINE | re.DOTALL | re.IGNORECASE,
)

_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")


def find_rlspec_block(markdown: str) -> str | None:
    """Return the body of the first ``rlspec`` fenced block, if any."""
    m = _FENCE_RE.search(markdown)
    return m.group("body") if m else None


def _parse_numbers(value: str, key: str, n: int | None = None) -> list[float]:
    nums = [float(tok) for tok in _NUMBER_RE.findall(value)]
    if not nums or (n is not None and len(nums) != n):
        want = f"{n} numbers" if n is not None else "numbers"
        raise RLSpecFormatError(f"{key}: expected {want}, got {value.strip()!r}")
    return nums


def _parse_points(value: str, key: str) -> list[Point2]:
    nums = _parse_numbers(value, key)
    if len(nums) % 2 != 0:
        raise RLSpecFormatError(f"{key}: expected (x, y) pairs, got {value.strip()!r}")
    return [Point2(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]


def _parse_block(body: str) -> dict:
    """Parse key/value lines; unknown keys are ignored (LLM chatter)."""
    out: dict = {}
    for raw in body.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower().replace("-", "_").replace(" ", "_")
        value = value.strip()
        if key == "algorithm":
            out["algorithm"] = Algorithm.from_text(value)
        elif key in ("episodes", "max_steps", "seed"):
            nums = _parse_numbers(value, key, 1)
            if nums[0] != int(nums[0]):
                raise RLSpecFormatError(f"{key}: expected an integer, got {value!r}")
            out[key] = int(nums[0])
        elif key in ("dt", "success_epsilon", "action_limit"):
            out[key] = _parse_numbers(value, key, 1)[0]
        elif key == "reward_weights":
            out[key] = tuple(_parse_numbers(value, key, 3))
        elif key == "links":
            out[key] = tuple(_parse_numbers(value, key))
        elif key == "base":
            pts = _parse_points(value, key)
            if len(pts) != 1:
                raise RLSpecFormatError(f"base: expected one (x, y) pair")
            out[key] = pts[0]
        elif key == "targets":
            out[key] = tuple(_parse_points(value, key))
    return out


def _check_geometry(block: dict, links, base, targets) -> None:
    bad: list[str] = []
    if "links" in block:
        stated = block["links"]
        if len(stated) != len(links) or any(
            abs(a - b) > 1e-6 for a, b in zip(sorted(stated), sorted(links))
        ):
            bad.append("links")
    if "base" in block:
        p = block["base"]
        if abs(p.x - base.x) > 1e-6 or abs(p.y - base.y) > 1e-6:
            bad.append("base")
    if "targets" in block:
        stated = block["targets"]
        if len(stated) != len(targets) or any(
            abs(a.x - b.x) > 1e-6 or abs(a.y - b.y) > 1e-6
            for a, b in zip(stated, targets)
        ):
            bad.append("targets")
    if bad:
        raise RLSpecConsistencyError(
            bad, f"rlspec block contradicts the robot design on: {', '.join(bad)}"
        )


def parse_rlspec(report, design, robot_index: int = 0) -> RLSpec:
    """Build the RLSpec for one robot of a design from a parsed RL report.

    ``report`` is an RLDesignReport (its raw markdown holds the block);
    ``design`` a RobotDesign. Raises RLSpecMissingError when no block is
    present, RLSpecFormatError on bad values, RLSpecConsistencyError when
    stated geometry disagrees with the design.
    """
    body = find_rlspec_block(report.raw_markdown)
    if body is None:
        raise RLSpecMissingError("report contains no fenced rlspec block")
    block = _parse_block(body)

    plan = design.robots[robot_index]
    links = plan.config.links
    base = plan.config.base
    targets = tuple(design.targets[i] for i in plan.target_indices)
    _check_geometry(block, links, base, targets)

    algorithm = block.get("algorithm")
    if algorithm is None:
        algorithm = report.algorithm if report.algorithm is not None else Algorithm("ppo")

    return RLSpec(
        algorithm=algorithm,
        links=links,
        base=base,
        targets=targets,
        dt=block.get("dt", DEFAULTS["dt"]),
        max_steps_per_episode=block.get("max_steps", DEFAULTS["max_steps"]),
        success_epsilon=block.get("success_epsilon", DEFAULTS["success_epsilon"]),
        action_limit=block.get("action_limit", DEFAULTS["action_limit"]),
        reward_weights=block.get("reward_weights", DEFAULTS["reward_weights"]),
        episodes=block.get("episodes", DEFAULTS["episodes"]),
        seed=block.get("seed", DEFAULTS["seed"]) + robot_index,
    )


def spec_for_design(
    design,
    robot_index: int = 0,
    algorithm: str = "ppo",
    episodes: int | None = None,
    seed: int | None = None,
) -> RLSpec:
    """Default-spec shortcut for running the engine without any report."""
    plan = design.robots[robot_index]
    return RLSpec(
        algorithm=Algorithm(algorithm),
        links=plan.config.links,
        base=plan.config.base,
        targets=tuple(design.targets[i] for i in plan.target_indices),
        dt=DEFAULTS["dt"],
        max_steps_per_episode=DEFAULTS["max_steps"],
        success_epsilon=DEFAULTS["success_epsilon"],
        action_limit=DEFAULTS["action_limit"],
        reward_weights=DEFAULTS["reward_weights"],
        episodes=DEFAULTS["episodes"] if episodes is None else episodes,
        seed=(DEFAULTS["seed"] if seed is None else seed) + robot_index,
    )
