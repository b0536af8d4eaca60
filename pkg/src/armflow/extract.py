"""Deterministic code extraction and final-report assembly.

Models embed code as fenced blocks with unreliable labeling, so the
filename for each block is resolved by a fixed ladder: an explicit
``name=...`` token in the fence info string wins; else the nearest
preceding heading or bold line that names a file; else the canonical
position fallback env.py / train.py / eval.py (configuration blocks
tagged ``rlspec`` never consume those slots). Merging keeps the prose
of every stage report and replaces each fence with a placeholder line,
so the final report carries no executable code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .reports import CodeArtifact

__all__ = ["extract_code", "write_code_files", "merge_reports", "CANONICAL_FILENAMES"]

CANONICAL_FILENAMES = ("env.py", "train.py", "eval.py")

_FENCE_OPEN = re.compile(r"^(?P<indent> {0,3})(?P<fence>```+|~~~+)(?P<info>[^\n]*)$")
_FILENAME_TOKEN = re.compile(r"(?<![\w./-])([\w./-]+\.[A-Za-z0-9]{1,6})(?![\w./-])")
_NAME_ATTR = re.compile(r"\bname=([^\s`]+)")

_EXT_BY_LANG = {
    "python": "py",
    "py": "py",
    "json": "json",
    "yaml": "yaml",
    "yml": "yaml",
    "toml": "toml",
    "bash": "sh",
    "sh": "sh",
}


@dataclass(frozen=True)
class _Fence:
    start: int  # line index of the opening fence
    end: int  # line index of the closing fence (== start section end)
    info: str
    body: str


def _scan_fences(lines: list[str]) -> list[_Fence]:
    fences: list[_Fence] = []
    i = 0
    while i < len(lines):
        m = _FENCE_OPEN.match(lines[i])
        if not m:
            i += 1
            continue
        marker = m.group("fence")
        close = re.compile(rf"^ {{0,3}}{re.escape(marker[0])}{{{len(marker)},}}\s*$")
        j = i + 1
        while j < len(lines) and not close.match(lines[j]):
            j += 1
        if j >= len(lines):
            break  # unterminated fence: ignore the remainder
        fences.append(
            _Fence(start=i, end=j, info=m.group("info").strip(), body="\n".join(lines[i + 1 : j]))
        )
        i = j + 1
    return fences


def _language_tag(info: str) -> str:
    for token in info.split():
        if "=" not in token:
            return token.lower()
    return "unknown"


def _heading_filename(lines: list[str], before: int) -> str | None:
    """Nearest preceding heading/bold/short line that names a file."""
    for k in range(before - 1, -1, -1):
        line = lines[k].strip()
        if not line:
            continue
        marked = line.startswith("#") or line.startswith("**")
        if not marked and len(line.split()) > 6:
            return None  # hit ordinary prose; stop looking
        cleaned = line.strip("#* `").strip()
        m = _FILENAME_TOKEN.search(cleaned)
        if m:
            return m.group(1)
        if marked:
            return None  # a heading without a filename shadows earlier ones
    return None


def _resolved_names(lines: list[str], fences: list[_Fence]) -> list[tuple[str, str]]:
    """(filename, language) per fence, applying the resolution ladder."""
    names: list[tuple[str, str]] = []
    slot = 0  # position among fallback-eligible code blocks
    for fence in fences:
        lang = _language_tag(fence.info)
        attr = _NAME_ATTR.search(fence.info)
        if attr:
            names.append((attr.group(1), lang))
            if lang != "rlspec":
                slot += 1
            continue
        heading = _heading_filename(lines, fence.start)
        if heading:
            names.append((heading, lang))
            if lang != "rlspec":
                slot += 1
            continue
        if lang == "rlspec":
            names.append(("rlspec.txt", lang))
            continue
        if slot < len(CANONICAL_FILENAMES):
            names.append((CANONICAL_FILENAMES[slot], lang))
        else:
            names.append((f"code_{slot + 1}.{_EXT_BY_LANG.get(lang, 'txt')}", lang))
        slot += 1
    return names


def extract_code(markdown: str) -> list[CodeArtifact]:
    """Extract every fenced block as a code artifact (empty input: [])."""
    lines = markdown.splitlines()
    fences = _scan_fences(lines)
    artifacts: list[CodeArtifact] = []
    for fence, (name, lang) in zip(fences, _resolved_names(lines, fences)):
        if not fence.body:
            continue
        artifacts.append(CodeArtifact(filename=name, language_tag=lang, source=fence.body))
    return artifacts


def write_code_files(artifacts: list[CodeArtifact], out_dir: "Path | str") -> list[Path]:
    """Write one file per artifact (LF newlines); collisions get -2, -3, ...

    Filesystem failures surface as OSError naming the offending path.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    used: set[str] = set()
    paths: list[Path] = []
    for artifact in artifacts:
        name = artifact.filename
        if name in used:
            stem, dot, ext = name.partition(".")
            k = 2
            while f"{stem}-{k}{dot}{ext}" in used:
                k += 1
            name = f"{stem}-{k}{dot}{ext}"
        used.add(name)
        path = out / name
        source = artifact.source.replace("\r\n", "\n").replace("\r", "\n")
        try:
            path.write_bytes(source.encode("utf-8"))
        except OSError as exc:
            raise OSError(f"writing {path}: {exc}") from exc
        paths.append(path)
    return paths


def _strip_fences(markdown: str) -> str:
    """Replace each fenced block with its ``[code artifact: ...]`` line."""
    lines = markdown.splitlines()
    fences = _scan_fences(lines)
    if not fences:
        return markdown
    names = _resolved_names(lines, fences)
    out: list[str] = []
    pos = 0
    for fence, (name, _) in zip(fences, names):
        out.extend(lines[pos : fence.start])
        out.append(f"[code artifact: {name}]")
        pos = fence.end + 1
    out.extend(lines[pos:])
    return "\n".join(out)


def merge_reports(artifacts) -> str:
    """Assemble the final run report from a PipelineArtifacts value.

    The header records the run identity and per-stage outcomes; each
    present report follows in pipeline order with all fenced blocks
    replaced by placeholders.
    """
    header = [
        "# Final Report",
        "",
        f"- Scenario: {artifacts.scenario_id}",
        f"- Model: {artifacts.model_id}",
        f"- Ablation: {artifacts.ablation_label}",
        f"- Stages: {artifacts.status.summary()}",
        "",
    ]
    parts = ["\n".join(header)]
    titled = (
        ("Task Analysis Report", artifacts.analysis),
        ("Robot Design Report", artifacts.design),
        ("RL Design Report", artifacts.rl),
    )
    for title, report in titled:
        if report is None:
            continue
        parts.append(f"## {title}\n\n{_strip_fences(report.raw_markdown)}\n")
    return "\n".join(parts)
