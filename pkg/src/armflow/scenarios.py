"""Task scenarios: geometry fixtures, description rendering, serialization.

A scenario bundles everything a run needs: candidate base positions,
target points the arm tips must visit, the catalogue of link lengths,
and prose describing the job. Ten built-in fixtures cover five medical
and five industrial tasks; an eleventh "example" scenario (a factory
pick-up line) drives the ablation benchmarks.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

__all__ = [
    "Point2",
    "TaskScenario",
    "DescriptionLength",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "builtin_scenarios",
    "example_scenario",
    "scenario_by_id",
    "parse_scenario",
    "serialize_scenario",
    "render_description",
    "word_count",
]


class ScenarioError(ValueError):
    """Base class for scenario file problems."""


class ScenarioParseError(ScenarioError):
    """Malformed scenario file; message names the offending field."""


class ScenarioValidationError(ScenarioError):
    """Structurally valid file whose values violate an invariant."""


@dataclass(frozen=True)
class Point2:
    """A planar point in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ScenarioValidationError(f"point: coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


class DescriptionLength(enum.Enum):
    """Detail level of the generated task prose."""

    SHORT = "short"
    NORMAL = "normal"
    LONG = "long"

    @classmethod
    def from_name(cls, name: str) -> "DescriptionLength":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ScenarioValidationError(
                f"length: expected one of short/normal/long, got {name!r}"
            ) from None


@dataclass(frozen=True)
class TaskScenario:
    """One task: geometry plus prose.

    Invariants are enforced at construction: at least one base option and
    one target, strictly positive link lengths, non-empty description.
    """

    id: str
    title: str
    description: str
    base_options: tuple[Point2, ...]
    targets: tuple[Point2, ...]
    link_options: tuple[float, ...]
    max_links_per_robot: int = 3

    def __post_init__(self) -> None:
        if not self.id:
            raise ScenarioValidationError("id: empty")
        if not self.title:
            raise ScenarioValidationError("title: empty")
        if not self.description.strip():
            raise ScenarioValidationError("description: empty")
        if not self.base_options:
            raise ScenarioValidationError("base_options: empty")
        if not self.targets:
            raise ScenarioValidationError("targets: empty")
        if not self.link_options:
            raise ScenarioValidationError("link_options: empty")
        for length in self.link_options:
            if not (math.isfinite(length) and length > 0):
                raise ScenarioValidationError("link_options: must be > 0")
        if self.max_links_per_robot < 1:
            raise ScenarioValidationError("max_links_per_robot: must be >= 1")


def _scenario(
    sid: str,
    title: str,
    description: str,
    bases: list[tuple[float, float]],
    targets: list[tuple[float, float]],
    links: list[float],
) -> TaskScenario:
    return TaskScenario(
        id=sid,
        title=title,
        description=description,
        base_options=tuple(Point2(x, y) for x, y in bases),
        targets=tuple(Point2(x, y) for x, y in targets),
        link_options=tuple(links),
    )


# The ten stock task definitions. Coordinates are meters in a shared
# planar frame; scenarios 1-5 are medical settings, 6-10 industrial.
_BUILTINS: tuple[TaskScenario, ...] = (
    _scenario(
        "1",
        "Rehabilitation Therapy",
        "A clinic arm guides a patient's limb through prescribed reach exercises.",
        [(0.0, 0.0), (0.5, 0.0)],
        [(0.5, 1.2), (0.8, 1.5), (1.0, 1.0)],
        [0.8, 1.0, 1.2],
    ),
    _scenario(
        "2",
        "Surgical Instrument Handling",
        "An assistant arm passes sterile instruments to precise handover points.",
        [(0.0, 0.5), (0.2, 0.3)],
        [(0.5, 0.5), (0.7, 0.7), (1.0, 0.6)],
        [0.7, 0.9, 1.1],
    ),
    _scenario(
        "3",
        "Elderly Feeding Assistance",
        "A care arm brings utensils from a tray to comfortable feeding positions.",
        [(0.0, -0.5), (-0.3, -0.5)],
        [(0.4, 0.2), (0.5, 0.5), (0.6, 0.3)],
        [0.6, 0.8, 1.0],
    ),
    _scenario(
        "4",
        "Physical Therapy Stretching",
        "A therapy arm applies slow guided stretches across a treatment couch.",
        [(0.5, 0.0), (0.3, -0.2)],
        [(0.5, 1.0), (0.6, 1.2), (0.8, 1.1)],
        [0.9, 1.1, 1.3],
    ),
    _scenario(
        "5",
        "Prosthetic Limb Training",
        "A training arm demonstrates reach motions for prosthesis users to mirror.",
        [(0.0, 0.0), (0.2, -0.2)],
        [(0.3, 0.4), (0.5, 0.6), (0.7, 0.5)],
        [0.7, 0.9, 1.2],
    ),
    _scenario(
        "6",
        "Assembly Line Placement",
        "A bench arm places components onto fixtures spaced along a line feed.",
        [(0.0, 0.0), (0.0, 0.3)],
        [(0.4, 0.3), (0.6, 0.5), (0.8, 0.4)],
        [0.8, 1.0, 1.2],
    ),
    _scenario(
        "7",
        "Warehouse Item Sorting",
        "A sorting arm lifts parcels from a chute and drops them into bins.",
        [(0.0, 0.0), (-0.5, 0.0)],
        [(0.5, 1.0), (0.7, 1.2), (1.0, 1.1)],
        [0.9, 1.1, 1.3],
    ),
    _scenario(
        "8",
        "Automobile Welding",
        "A welding arm tacks seams at marked stations along a car body panel.",
        [(0.0, 0.0), (1.2, 0.5)],
        [(0.4, 0.2), (0.6, 0.3), (0.8, 0.4)],
        [0.7, 0.9, 1.0],
    ),
    _scenario(
        "9",
        "Pick-and-Place for Electronics",
        "A desktop arm moves small boards between test jigs and output trays.",
        [(0.0, 0.0), (0.2, 0.3)],
        [(0.3, 0.4), (0.5, 0.5), (0.7, 0.6)],
        [0.6, 0.8, 1.0],
    ),
    _scenario(
        "10",
        "Palletizing in Logistics",
        "A depot arm stacks cartons from a conveyor onto a growing pallet.",
        [(0.0, 0.0), (0.5, 0.5)],
        [(0.4, 0.5), (0.6, 0.7), (0.8, 1.0)],
        [0.9, 1.2, 1.5],
    ),
)

# Factory pick-up line used by the ablation benchmark. Bases sit 10 m
# apart; four boxes form a parallel line 20 m in front of their midpoint
# with 5 m gaps. Stored at face value in meters.
_EXAMPLE = _scenario(
    "example",
    "Factory Box Pick-Up",
    "A factory floor needs serial-arm manipulators to pick four boxes lined up in front of two fixed mounting bases.",
    [(-5.0, 0.0), (5.0, 0.0)],
    [(-7.5, 20.0), (-2.5, 20.0), (2.5, 20.0), (7.5, 20.0)],
    [10.0, 5.0, 2.0],
)


def builtin_scenarios() -> list[TaskScenario]:
    """Return the ten stock scenarios in catalogue order."""
    return list(_BUILTINS)


def example_scenario() -> TaskScenario:
    """Return the factory pick-up scenario used by the ablation benchmark."""
    return _EXAMPLE


def scenario_by_id(sid: str) -> TaskScenario:
    """Look up a stock scenario (including ``example``) by id."""
    for sc in (*_BUILTINS, _EXAMPLE):
        if sc.id == sid:
            return sc
    raise KeyError(f"unknown scenario id: {sid!r}")


# -- serialization ---------------------------------------------------------

def serialize_scenario(scenario: TaskScenario) -> bytes:
    """Encode a scenario as a UTF-8 JSON document."""
    doc = {
        "id": scenario.id,
        "title": scenario.title,
        "description": scenario.description,
        "base_options": [[p.x, p.y] for p in scenario.base_options],
        "targets": [[p.x, p.y] for p in scenario.targets],
        "link_options": list(scenario.link_options),
        "max_links_per_robot": scenario.max_links_per_robot,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _require(doc: dict, key: str, kind: type, where: str = "") -> object:
    if key not in doc:
        raise ScenarioParseError(f"{where}{key}: missing")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ScenarioParseError(f"{where}{key}: expected a number")
        return float(value)
    if not isinstance(value, kind):
        raise ScenarioParseError(f"{where}{key}: expected {kind.__name__}")
    return value


def _parse_points(raw: object, key: str) -> tuple[Point2, ...]:
    if not isinstance(raw, list):
        raise ScenarioParseError(f"{key}: expected a list of [x, y] pairs")
    points = []
    for i, item in enumerate(raw):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
        ):
            raise ScenarioParseError(f"{key}[{i}]: expected an [x, y] number pair")
        points.append(Point2(float(item[0]), float(item[1])))
    return tuple(points)


def parse_scenario(data: bytes) -> TaskScenario:
    """Decode a scenario file; raise on malformed input or bad values."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ScenarioParseError(f"document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError("document: expected a JSON object")

    sid = _require(doc, "id", str)
    title = _require(doc, "title", str)
    description = _require(doc, "description", str)
    bases = _parse_points(doc.get("base_options", []), "base_options")
    targets = _parse_points(doc.get("targets", []), "targets")
    raw_links = doc.get("link_options", [])
    if not isinstance(raw_links, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw_links
    ):
        raise ScenarioParseError("link_options: expected a list of numbers")
    links = tuple(float(v) for v in raw_links)
    max_links = doc.get("max_links_per_robot", 3)
    if not isinstance(max_links, int) or isinstance(max_links, bool):
        raise ScenarioParseError("max_links_per_robot: expected an integer")

    return TaskScenario(
        id=sid,
        title=title,
        description=description,
        base_options=bases,
        targets=targets,
        link_options=links,
        max_links_per_robot=max_links,
    )


# -- description rendering -------------------------------------------------

def word_count(text: str) -> int:
    return len(text.split())


def _fmt(value: float) -> str:
    return f"{value:g}"


def _fmt_point(p: Point2) -> str:
    return f"({_fmt(p.x)}, {_fmt(p.y)})"


def _join(parts: list[str]) -> str:
    if len(parts) == 1:
        return parts[0]
    return ", ".join(parts[:-1]) + " and " + parts[-1]


_FILLERS = (
    "Operators expect steady, repeatable motion with no manual repositioning between runs.",
    "Every reach must stay within the planar workspace and respect the chosen mounting point.",
    "Hardware cost matters, so shorter link combinations are preferred whenever they suffice.",
    "The controller should settle on each point quickly and without overshoot or oscillation.",
    "Plan the build so that a single commissioning pass covers every listed point in turn.",
    "Document any assumption the build makes so reviewers can trace each decision later.",
)

_DOMAIN_CONTEXT = (
    "Automated manipulators are now routine in settings like this one, where a fixed "
    "workcell replaces repetitive manual handling. Before any hardware is ordered, the "
    "team needs a paper design: how many arms, where they mount, and which link lengths "
    "to buy from the supplier catalogue. Each candidate design is judged on whether the "
    "arm can actually reach every working point, on the total length of material it "
    "consumes, and on how much margin it leaves for calibration error. Designs that "
    "barely graze a target are fragile in practice, while heavily oversized arms waste "
    "budget and swing more mass than the task needs.",
    "Once the mechanical layout is fixed, a motion policy has to be produced for the "
    "joints. The team prefers a learned controller: the arm is simulated as a chain of "
    "revolute joints driven by bounded joint velocities, and a reinforcement-learning "
    "loop rewards progress toward the current working point. The deliverables are the "
    "usual engineering artifacts: a written analysis, a justified design, training "
    "curves, joint traces, and tip trajectories that show each point being reached.",
)


def render_description(scenario: TaskScenario, level: DescriptionLength) -> str:
    """Produce task prose at the requested level of detail.

    Short names the task with no geometry; normal is a 100-150 word brief
    embedding every base, target, and link option; long prefixes the
    normal brief with domain-context paragraphs (>= 250 words total).
    """
    if level is DescriptionLength.SHORT:
        return f"Carry out the {scenario.title} task using the available planar robot arms."

    normal = _render_normal(scenario)
    if level is DescriptionLength.NORMAL:
        return normal
    return "\n\n".join((*_DOMAIN_CONTEXT, normal))


def _render_normal(scenario: TaskScenario) -> str:
    bases = _join([_fmt_point(p) for p in scenario.base_options])
    targets = _join([_fmt_point(p) for p in scenario.targets])
    links = _join([f"{_fmt(v)} m" for v in scenario.link_options])
    sentences = [
        f"This task, {scenario.title}, takes place in a flat workspace measured in meters.",
        scenario.description,
        f"The robot base options are {bases}.",
        f"The target points are {targets}, all given in the same frame as the bases.",
        f"The available robot arm link lengths are {links}.",
        (
            f"A robot may chain up to {scenario.max_links_per_robot} links in series, "
            "and the same catalogue length may be used more than once."
        ),
        "Choose mounting points and link combinations so every target point can be reached.",
    ]
    text = " ".join(sentences)
    for filler in _FILLERS:
        if word_count(text) >= 100:
            break
        text = text + " " + filler
    return text
