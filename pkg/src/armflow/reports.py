"""Agent report schemas and tolerant markdown parsing.

Each of the three agents answers with a five-section markdown report.
Models drift on formatting (renumbered headings, bold instead of ``#``,
inline ``Heading: value`` lines), so section lookup is fuzzy: headings
are normalized (lowercase, digits and punctuation stripped) and matched
by token overlap. Geometry is pulled out of section bodies by scanning
for ``(x, y)`` pairs and unit-suffixed lengths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Union

from .scenarios import Point2

__all__ = [
    "ReportKind",
    "TaskAnalysisReport",
    "RobotDesignReport",
    "RLDesignReport",
    "CodeArtifact",
    "ReportSchemaError",
    "ReportExtractionError",
    "parse_report",
    "ANALYSIS_HEADINGS",
    "DESIGN_HEADINGS",
    "RL_HEADINGS",
    "find_sections",
]


class ReportSchemaError(ValueError):
    """Required sections are missing; carries the absent headings."""

    def __init__(self, missing: list[str], kind: str):
        super().__init__(f"{kind} report is missing sections: {missing}")
        self.missing = missing


class ReportExtractionError(ValueError):
    """A required structured value could not be parsed; carries context."""

    def __init__(self, message: str, line: str = ""):
        super().__init__(f"{message}" + (f" (near: {line.strip()!r})" if line else ""))
        self.line = line


@dataclass(frozen=True)
class CodeArtifact:
    """One extracted code file."""

    filename: str
    language_tag: str
    source: str

    def __post_init__(self) -> None:
        if not self.filename:
            raise ValueError("filename: empty")
        if not self.source:
            raise ValueError("source: empty")


@dataclass(frozen=True)
class TaskAnalysisReport:
    raw_markdown: str
    num_targets: int
    num_robots: int
    base_options: tuple[Point2, ...]
    link_options: tuple[float, ...]
    arm_choices_notes: str


@dataclass(frozen=True)
class RobotDesignReport:
    raw_markdown: str
    required_robots: int
    selected_bases: tuple[Point2, ...]
    design_rationale: str
    arm_configurations: tuple[tuple[int, tuple[float, ...]], ...]
    summary: str


@dataclass(frozen=True)
class RLDesignReport:
    raw_markdown: str
    env_design: str
    motor_motion: str
    algorithm: "object"  # rl.Algorithm; typed loosely to avoid a cycle
    success_failure_criteria: str
    initial_conditions: str
    code_blocks: tuple[CodeArtifact, ...]
    rl_spec: "object | None" = None  # attached by the pipeline after geometry checks

    def with_spec(self, spec) -> "RLDesignReport":
        return replace(self, rl_spec=spec)


Report = Union[TaskAnalysisReport, RobotDesignReport, RLDesignReport]

ANALYSIS_HEADINGS = (
    "Number of Targets to be Reached",
    "Number of Robots to be Built",
    "Base Location Options",
    "Arm Link Length Options",
    "Arm Choices Information",
)
DESIGN_HEADINGS = (
    "Required Number of Robots",
    "Selected Base Location",
    "Design Decisions for Robotic Arms",
    "Final Robotic Arm Configuration",
    "Summary",
)
RL_HEADINGS = (
    "Environment Design",
    "Motor Motion Definition",
    "Reinforcement Learning Algorithm Selection",
    "Success and Failure Criteria",
    "Initial Conditions",
)

ReportKind = str  # "analysis" | "design" | "rl"

_KIND_HEADINGS = {
    "analysis": ANALYSIS_HEADINGS,
    "design": DESIGN_HEADINGS,
    "rl": RL_HEADINGS,
}


# -- heading machinery -------------------------------------------------------

_HEADING_LINE = re.compile(
    r"""^\s*
        (?:\#{1,6}\s*)?          # markdown heading marks
        (?:\*\*)?                # opening bold
        \s*(?:\d+[\.\)]\s*)?     # list numbering like "3." or "3)"
        (?P<text>[^\n]*?)
        (?:\*\*)?\s*$            # closing bold
    """,
    re.VERBOSE,
)

_TOKEN_RE = re.compile(r"[a-z]+")


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


def _heading_candidate(line: str) -> tuple[str, str] | None:
    """If the line looks like a heading/label, return (title, inline_rest)."""
    stripped = line.strip()
    if not stripped or len(stripped) > 120:
        return None
    looks_marked = stripped.startswith("#") or stripped.startswith("**")
    body = stripped.lstrip("#").strip()
    body = re.sub(r"^\*\*|\*\*$", "", body).strip()
    body = re.sub(r"^\d+[\.\)]\s*", "", body)
    inline = ""
    if ":" in body:
        head, _, rest = body.partition(":")
        body, inline = head.strip(), rest.strip()
    # A bare prose line only counts as a heading when it is short;
    # marked lines (#, **, numbering) always count.
    if not looks_marked and not re.match(r"^\s*\d+[\.\)]\s", stripped):
        if len(body.split()) > 8:
            return None
    if not body:
        return None
    return body, inline


def _match_score(required: str, candidate: str) -> float:
    req = _tokens(required)
    if not req:
        return 0.0
    return len(req & _tokens(candidate)) / len(req)


def find_sections(markdown: str, headings: tuple[str, ...]) -> dict[str, str]:
    """Locate each required heading and return its body text.

    Bodies run to the next heading-like line that matches any required
    heading. An inline remainder (``Heading: value``) is prepended to
    the body. Missing headings are absent from the result.
    """
    lines = markdown.splitlines()
    # All candidate heading positions with their best-matching heading.
    marks: list[tuple[int, str, str]] = []  # (line index, heading, inline rest)
    for i, line in enumerate(lines):
        cand = _heading_candidate(line)
        if cand is None:
            continue
        title, inline = cand
        best, best_score = None, 0.0
        for h in headings:
            score = _match_score(h, title)
            if score > best_score:
                best, best_score = h, score
        if best is not None and best_score >= 0.8:
            marks.append((i, best, inline))

    sections: dict[str, str] = {}
    for k, (start, heading, inline) in enumerate(marks):
        if heading in sections:
            continue  # first occurrence wins
        end = marks[k + 1][0] if k + 1 < len(marks) else len(lines)
        body = "\n".join(lines[start + 1 : end]).strip()
        if inline:
            body = (inline + "\n" + body).strip()
        sections[heading] = body
    return sections


# -- value scanning ----------------------------------------------------------

_PAIR_RE = re.compile(
    r"\(\s*(-?\d+(?:\.\d+)?)\s*m?\s*,\s*(-?\d+(?:\.\d+)?)\s*m?\s*\)"
)
_BARE_PAIR_RE = re.compile(
    r"(?<![\d.])(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)(?![\d.]|\s*m)"
)
_LENGTH_RE = re.compile(r"(-?\d+(?:\.\d+)?)\s*(?:m\b|meters?\b)")
_DECIMAL_RE = re.compile(r"-?\d+\.\d+")
_INT_RE = re.compile(r"\d+")


def scan_points(text: str, allow_bare: bool = False) -> list[Point2]:
    """Extract coordinate pairs: ``(x, y)`` always, bare ``x, y`` on request."""
    pts = [Point2(float(x), float(y)) for x, y in _PAIR_RE.findall(text)]
    if not pts and allow_bare:
        pts = [Point2(float(x), float(y)) for x, y in _BARE_PAIR_RE.findall(text)]
    return pts


def scan_lengths(text: str) -> list[float]:
    """Extract link lengths: unit-suffixed numbers, else bare decimals."""
    vals = [float(v) for v in _LENGTH_RE.findall(text)]
    if not vals:
        vals = [float(v) for v in _DECIMAL_RE.findall(text)]
    return vals


def _first_int(text: str, what: str) -> int:
    m = _INT_RE.search(text)
    if m is None:
        raise ReportExtractionError(f"{what}: no integer found", text.splitlines()[0] if text else "")
    return int(m.group())


# -- per-kind parsers --------------------------------------------------------

def parse_report(markdown: str, kind: ReportKind) -> Report:
    """Parse an agent's markdown into its structured report.

    ``kind`` is one of "analysis", "design", "rl". Raises
    ReportSchemaError when required sections are absent and
    ReportExtractionError when a required value cannot be read.
    """
    if not markdown.strip():
        raise ReportSchemaError(list(_KIND_HEADINGS[kind]), kind)
    headings = _KIND_HEADINGS[kind]
    sections = find_sections(markdown, headings)
    missing = [h for h in headings if h not in sections]
    if missing:
        raise ReportSchemaError(missing, kind)
    if kind == "analysis":
        return _parse_analysis(markdown, sections)
    if kind == "design":
        return _parse_design(markdown, sections)
    if kind == "rl":
        return _parse_rl(markdown, sections)
    raise ValueError(f"unknown report kind {kind!r}")


def _parse_analysis(markdown: str, sections: dict[str, str]) -> TaskAnalysisReport:
    base_text = sections["Base Location Options"]
    bases = scan_points(base_text, allow_bare=True)
    if not bases:
        raise ReportExtractionError(
            "base options: no coordinate pair found",
            base_text.splitlines()[0] if base_text else "",
        )
    links = scan_lengths(sections["Arm Link Length Options"])
    if not links:
        raise ReportExtractionError("link options: no lengths found")
    return TaskAnalysisReport(
        raw_markdown=markdown,
        num_targets=_first_int(sections["Number of Targets to be Reached"], "targets"),
        num_robots=_first_int(sections["Number of Robots to be Built"], "robots"),
        base_options=tuple(bases),
        link_options=tuple(links),
        arm_choices_notes=sections["Arm Choices Information"],
    )


_ROBOT_LINE = re.compile(r"robot\s*#?\s*(\d+)", re.IGNORECASE)


def _parse_design(markdown: str, sections: dict[str, str]) -> RobotDesignReport:
    config_text = sections["Final Robotic Arm Configuration"]
    configs: list[tuple[int, tuple[float, ...]]] = []
    for line in config_text.splitlines():
        m = _ROBOT_LINE.search(line)
        if not m:
            continue
        lengths = scan_lengths(line[m.end():])
        if lengths:
            configs.append((int(m.group(1)), tuple(lengths)))
    if not configs:
        lengths = scan_lengths(config_text)
        if not lengths:
            raise ReportExtractionError(
                "final arm configuration: no link lengths found",
                config_text.splitlines()[0] if config_text else "",
            )
        configs.append((1, tuple(lengths)))
    bases = scan_points(sections["Selected Base Location"], allow_bare=True)
    if not bases:
        raise ReportExtractionError("selected base: no coordinate pair found")
    return RobotDesignReport(
        raw_markdown=markdown,
        required_robots=_first_int(sections["Required Number of Robots"], "robots"),
        selected_bases=tuple(bases),
        design_rationale=sections["Design Decisions for Robotic Arms"],
        arm_configurations=tuple(configs),
        summary=sections["Summary"],
    )


_ALGO_LINE = re.compile(r"\balgorithm\b[^:\n]*:\s*([^\n.,;]+)", re.IGNORECASE)


def _parse_rl(markdown: str, sections: dict[str, str]) -> RLDesignReport:
    from .extract import extract_code
    from .rl.rlspec import Algorithm

    # An explicit "Algorithm: X" statement beats scanning the discussion,
    # which may name rejected alternatives.
    algo_text = sections["Reinforcement Learning Algorithm Selection"]
    m = _ALGO_LINE.search(algo_text) or _ALGO_LINE.search(markdown)
    algorithm = Algorithm.from_text(m.group(1) if m else algo_text)

    return RLDesignReport(
        raw_markdown=markdown,
        env_design=sections["Environment Design"],
        motor_motion=sections["Motor Motion Definition"],
        algorithm=algorithm,
        success_failure_criteria=sections["Success and Failure Criteria"],
        initial_conditions=sections["Initial Conditions"],
        code_blocks=tuple(extract_code(markdown)),
    )
