"""Linear agent pipeline: analysis -> design -> RL report -> code -> run.

Agents are called in a fixed order; each one receives exactly the
previous agent's report (the first enabled agent gets the rendered task
description). Disabling an agent skips its stage: the next enabled
agent then receives the most recent upstream text prefixed with one
``UPSTREAM STAGE ABSENT: <stage>`` notice per skipped stage. A failed
stage stops the chain; the failure is recorded and later stages are
never attempted. All outcomes land in the artifacts value - nothing
raises out of a run.

Execution is native: the verified robot design (the report's own when
it checks out, otherwise the exhaustive-search reference design) is
trained with the in-process RL engine according to the report's rlspec
block. Generated code files are extracted and stored but never run.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

from .design import DEFAULT_MARGIN, DesignFindings, InfeasibleDesignError, RobotDesign, design_for_scenario, verify_design
from .extract import extract_code, merge_reports
from .gateway import ChatRequest, ChatResponse, Gateway, GatewayError, GatewayMode
from .prompts import rl_designer_prompt, robot_designer_prompt, task_analyst_prompt
from .reports import (
    CodeArtifact,
    ReportExtractionError,
    ReportSchemaError,
    RLDesignReport,
    RobotDesignReport,
    TaskAnalysisReport,
    parse_report,
)
from .rl import RLSpec, RLSpecError, TrainingResult, parse_rlspec, train
from .scenarios import DescriptionLength, TaskScenario, render_description

__all__ = [
    "Agent",
    "AblationConfig",
    "ABLATION_CONDITIONS",
    "StageOutcome",
    "StageStatus",
    "STAGES",
    "TranscriptEntry",
    "PipelineArtifacts",
    "run_pipeline",
    "write_transcript",
    "DEFAULT_MODEL_ID",
]

DEFAULT_MODEL_ID = "offline-stub"

COMPLETED = "completed"
SKIPPED = "skipped"
FAILED = "failed"

STAGES = ("analysis", "design", "rl_report", "code_extraction", "execution")
_STAGE_DISPLAY = {
    "analysis": "Analysis",
    "design": "Design",
    "rl_report": "RLReport",
    "code_extraction": "CodeExtraction",
    "execution": "Execution",
}


class Agent(enum.Enum):
    TASK_ANALYST = "task_analyst"
    ROBOT_DESIGNER = "robot_designer"
    RL_DESIGNER = "rl_designer"

    @classmethod
    def from_name(cls, name: str) -> "Agent":
        key = name.strip().lower().replace("-", "_").replace(" ", "_")
        for agent in cls:
            if agent.value == key:
                return agent
        raise ValueError(f"unknown agent {name!r}")


# The six disable conditions exercised by the ablation benchmark.
ABLATION_CONDITIONS: dict[str, frozenset[Agent]] = {
    "C1": frozenset({Agent.TASK_ANALYST}),
    "C2": frozenset({Agent.ROBOT_DESIGNER}),
    "C3": frozenset({Agent.RL_DESIGNER}),
    "C12": frozenset({Agent.TASK_ANALYST, Agent.ROBOT_DESIGNER}),
    "C13": frozenset({Agent.TASK_ANALYST, Agent.RL_DESIGNER}),
    "C23": frozenset({Agent.ROBOT_DESIGNER, Agent.RL_DESIGNER}),
}


@dataclass(frozen=True)
class AblationConfig:
    """Which agents are disabled, and the description detail level."""

    disabled: frozenset[Agent] = frozenset()
    length: DescriptionLength = DescriptionLength.NORMAL

    def __post_init__(self) -> None:
        if len(self.disabled) > 2:
            raise ValueError("at most two agents may be disabled")

    @classmethod
    def condition(
        cls, label: str, length: DescriptionLength = DescriptionLength.NORMAL
    ) -> "AblationConfig":
        if label not in ABLATION_CONDITIONS:
            raise ValueError(f"unknown ablation condition {label!r}")
        return cls(disabled=ABLATION_CONDITIONS[label], length=length)

    @property
    def condition_label(self) -> str:
        for label, agents in ABLATION_CONDITIONS.items():
            if agents == self.disabled:
                return label
        return "none"

    def describe(self) -> str:
        return f"{self.condition_label} (length={self.length.value})"


@dataclass(frozen=True)
class StageOutcome:
    state: str  # completed | skipped | failed
    reason: str | None = None

    def __post_init__(self) -> None:
        if self.state not in (COMPLETED, SKIPPED, FAILED):
            raise ValueError(f"bad stage state {self.state!r}")

    @property
    def completed(self) -> bool:
        return self.state == COMPLETED


@dataclass(frozen=True)
class StageStatus:
    """Per-stage outcomes, in pipeline order."""

    analysis: StageOutcome
    design: StageOutcome
    rl_report: StageOutcome
    code_extraction: StageOutcome
    execution: StageOutcome

    def __post_init__(self) -> None:
        outcomes = self.in_order()
        failed_seen = False
        for outcome in outcomes:
            if failed_seen and outcome.state == COMPLETED:
                raise ValueError("a stage after a failure cannot be completed")
            if outcome.state == FAILED:
                failed_seen = True

    def in_order(self) -> tuple[StageOutcome, ...]:
        return (self.analysis, self.design, self.rl_report, self.code_extraction, self.execution)

    def completed_stages(self) -> tuple[str, ...]:
        return tuple(s for s, o in zip(STAGES, self.in_order()) if o.completed)

    def summary(self) -> str:
        parts = []
        for name, outcome in zip(STAGES, self.in_order()):
            piece = f"{_STAGE_DISPLAY[name]}={outcome.state}"
            if outcome.reason:
                piece += f" ({outcome.reason})"
            parts.append(piece)
        return ", ".join(parts)


@dataclass(frozen=True)
class TranscriptEntry:
    agent: str
    request: ChatRequest
    response: ChatResponse


@dataclass(frozen=True)
class PipelineArtifacts:
    """Everything one pipeline run produced."""

    scenario_id: str
    model_id: str
    ablation: AblationConfig
    status: StageStatus
    analysis: TaskAnalysisReport | None
    design: RobotDesignReport | None
    rl: RLDesignReport | None
    code_files: tuple[CodeArtifact, ...]
    final_report: str
    transcript: tuple[TranscriptEntry, ...]
    design_findings: DesignFindings | None
    executed_design: RobotDesign | None
    design_source: str  # "report" | "reference" | "none"
    rl_specs: tuple[RLSpec, ...]
    rlspec_error: str | None
    execution: tuple[TrainingResult, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if (self.analysis is not None) != self.status.analysis.completed:
            raise ValueError("analysis report presence must match its stage status")
        if (self.design is not None) != self.status.design.completed:
            raise ValueError("design report presence must match its stage status")
        if (self.rl is not None) != self.status.rl_report.completed:
            raise ValueError("rl report presence must match its stage status")

    @property
    def ablation_label(self) -> str:
        return self.ablation.describe()


_ABSENT_NOTICE = "UPSTREAM STAGE ABSENT: {stage}"


def _compose_user_text(upstream: str, absent: list[str]) -> str:
    if not absent:
        return upstream
    notices = "\n".join(_ABSENT_NOTICE.format(stage=s) for s in absent)
    return f"{notices}\n\n{upstream}"


def run_pipeline(
    scenario: TaskScenario,
    ablation: AblationConfig | None = None,
    mode: GatewayMode | None = None,
    model_id: str = DEFAULT_MODEL_ID,
    gateway: Gateway | None = None,
    margin: float = DEFAULT_MARGIN,
) -> PipelineArtifacts:
    """Run the full pipeline for one scenario; never raises on stage failure.

    ``gateway`` takes precedence over ``mode``; one of them must be
    given. The returned artifacts carry every report, the transcript,
    stage statuses, and the native execution results.
    """
    if gateway is None:
        if mode is None:
            raise ValueError("run_pipeline needs a gateway or a mode")
        gateway = Gateway(mode)
    ablation = ablation or AblationConfig()

    description = render_description(scenario, ablation.length)
    transcript: list[TranscriptEntry] = []
    outcomes: dict[str, StageOutcome] = {}
    notes: list[str] = []

    analysis: TaskAnalysisReport | None = None
    design_report: RobotDesignReport | None = None
    rl_report: RLDesignReport | None = None

    upstream = description
    absent: list[str] = []
    chain_broken: str | None = None  # name of the failed stage

    def _agent_stage(
        stage: str, agent: Agent, prompt_builder, parse_kind: str
    ):
        """Run one LLM stage; returns the parsed report or None."""
        nonlocal upstream, chain_broken
        if chain_broken:
            outcomes[stage] = StageOutcome(SKIPPED, f"upstream stage failed: {chain_broken}")
            return None
        if agent in ablation.disabled:
            outcomes[stage] = StageOutcome(SKIPPED, "ablated")
            absent.append(_STAGE_DISPLAY[stage])
            return None
        request = prompt_builder(_compose_user_text(upstream, absent), model_id)
        try:
            response = gateway.complete(request)
        except GatewayError as exc:
            outcomes[stage] = StageOutcome(FAILED, f"gateway: {exc}")
            chain_broken = _STAGE_DISPLAY[stage]
            return None
        transcript.append(TranscriptEntry(agent.value, request, response))
        try:
            report = parse_report(response.content, parse_kind)
        except (ReportSchemaError, ReportExtractionError) as exc:
            outcomes[stage] = StageOutcome(FAILED, f"report parse: {exc}")
            chain_broken = _STAGE_DISPLAY[stage]
            return None
        outcomes[stage] = StageOutcome(COMPLETED)
        upstream = report.raw_markdown
        absent.clear()
        return report

    analysis = _agent_stage("analysis", Agent.TASK_ANALYST, task_analyst_prompt, "analysis")
    design_report = _agent_stage("design", Agent.ROBOT_DESIGNER, robot_designer_prompt, "design")
    rl_report = _agent_stage("rl_report", Agent.RL_DESIGNER, rl_designer_prompt, "rl")

    # Code extraction: deterministic, runs only on a completed RL report.
    code_files: tuple[CodeArtifact, ...] = ()
    if chain_broken:
        outcomes["code_extraction"] = StageOutcome(
            SKIPPED, f"upstream stage failed: {chain_broken}"
        )
    elif rl_report is None:
        outcomes["code_extraction"] = StageOutcome(SKIPPED, "no RL report (ablated)")
    else:
        code_files = tuple(extract_code(rl_report.raw_markdown))
        if code_files:
            outcomes["code_extraction"] = StageOutcome(COMPLETED)
        else:
            outcomes["code_extraction"] = StageOutcome(FAILED, "no code artifacts found")
            chain_broken = _STAGE_DISPLAY["code_extraction"]

    # Design verification plus native execution.
    findings: DesignFindings | None = None
    executed: RobotDesign | None = None
    design_source = "none"
    rl_specs: tuple[RLSpec, ...] = ()
    rlspec_error: str | None = None
    execution: tuple[TrainingResult, ...] = ()

    if design_report is not None:
        findings = verify_design(design_report, scenario, margin)

    if chain_broken:
        outcomes["execution"] = StageOutcome(SKIPPED, f"upstream stage failed: {chain_broken}")
    elif rl_report is None:
        outcomes["execution"] = StageOutcome(SKIPPED, "no RL report (ablated)")
    else:
        if findings is not None and findings.realized is not None:
            executed = findings.realized
            design_source = "report"
        else:
            if design_report is not None:
                notes.append(
                    "proposed design not realizable as stated; executing the reference design"
                )
            try:
                executed = design_for_scenario(scenario, margin)
                design_source = "reference"
            except InfeasibleDesignError as exc:
                outcomes["execution"] = StageOutcome(FAILED, f"no feasible design: {exc}")
                executed = None
        if executed is not None:
            try:
                rl_specs = tuple(
                    parse_rlspec(rl_report, executed, robot_index=i)
                    for i in range(len(executed.robots))
                )
            except RLSpecError as exc:
                rlspec_error = str(exc)
                outcomes["execution"] = StageOutcome(FAILED, f"rlspec: {exc}")
            else:
                execution = tuple(train(spec) for spec in rl_specs)
                rl_report = rl_report.with_spec(rl_specs[0])
                outcomes["execution"] = StageOutcome(COMPLETED)

    status = StageStatus(**{stage: outcomes[stage] for stage in STAGES})

    artifacts = PipelineArtifacts(
        scenario_id=scenario.id,
        model_id=model_id,
        ablation=ablation,
        status=status,
        analysis=analysis,
        design=design_report,
        rl=rl_report,
        code_files=code_files,
        final_report="",
        transcript=tuple(transcript),
        design_findings=findings,
        executed_design=executed,
        design_source=design_source,
        rl_specs=rl_specs,
        rlspec_error=rlspec_error,
        execution=execution,
        notes=tuple(notes),
    )
    # The final report needs the artifacts value itself for its header.
    from dataclasses import replace

    return replace(artifacts, final_report=merge_reports(artifacts))


def write_transcript(artifacts: PipelineArtifacts, path: "Path | str") -> Path:
    """Export the run's request/response pairs and stage statuses as JSON."""
    doc = {
        "scenario_id": artifacts.scenario_id,
        "model_id": artifacts.model_id,
        "ablation": artifacts.ablation_label,
        "stages": {
            stage: {"state": outcome.state, "reason": outcome.reason}
            for stage, outcome in zip(STAGES, artifacts.status.in_order())
        },
        "transcript": [
            {
                "agent": entry.agent,
                "request": {
                    "model": entry.request.model_id,
                    "temperature": entry.request.temperature,
                    "max_tokens": entry.request.max_tokens,
                    "messages": [
                        {"role": m.role, "content": m.content}
                        for m in entry.request.messages
                    ],
                },
                "response": {
                    "content": entry.response.content,
                    "model": entry.response.model_id,
                    "prompt_tokens": entry.response.prompt_tokens,
                    "completion_tokens": entry.response.completion_tokens,
                    "latency_ms": entry.response.latency_ms,
                },
            }
            for entry in artifacts.transcript
        ],
    }
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return out
