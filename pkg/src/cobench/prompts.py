"""Prompt assembly and program extraction.

The system text is a fixed template with the machine budget substituted in;
the user text carries the problem description plus the program template.
Feedback turns replay every demo test case of the previous iteration with
its input content and result message, then append one of two guidance
blocks depending on whether everything verified.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .suite import ProblemSuite
from .types import (
    CampaignConfig,
    CandidateProgram,
    ExtractionError,
    PreconditionError,
    ProblemId,
    StageOutcome,
    StageTag,
)

_PROMPT_DIR = Path(__file__).with_name("data") / "prompts"
_PLACEHOLDER = re.compile(r"\{[A-Z][A-Z0-9_]*\}")
_INPUT_SNIPPET_LIMIT = 16_000


def _template(name: str) -> str:
    return (_PROMPT_DIR / name).read_text(encoding="utf-8")


def _format_seconds(timeout_s: float) -> str:
    if float(timeout_s).is_integer():
        return str(int(timeout_s))
    return f"{timeout_s:g}"


@dataclass(frozen=True)
class CaseResult:
    """One demo test case of a finished iteration, as shown back to the model."""

    instance_id: str
    input_text: str
    message: str


@dataclass(frozen=True)
class SampleRecord:
    sample_index: int
    program_source: str | None        # None when extraction failed
    cases: tuple[CaseResult, ...] = ()
    all_verified: bool = False


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    samples: tuple[SampleRecord, ...] = field(default_factory=tuple)


def outcome_message(outcome: StageOutcome) -> str:
    if outcome.tag is StageTag.VERIFIED:
        return f"Solution verified. Cost: {outcome.cost:.6f}"
    if outcome.tag is StageTag.FAIL_III:
        return f"Solution rejected by the verifier: {outcome.detail}"
    if outcome.tag is StageTag.FAIL_II:
        return f"No valid output: {outcome.detail}"
    return f"Execution failed: {outcome.detail}"


def assemble_initial_prompt(
    problem: ProblemId,
    config: CampaignConfig,
    suite: ProblemSuite | None = None,
) -> tuple[str, str]:
    suite = suite or ProblemSuite()
    system_text = (
        _template("system.txt")
        .replace("{NUM_CPU_CORES}", str(config.cpu_cores))
        .replace("{TIMEOUT}", _format_seconds(config.resolved_timeout_s()))
    )
    leftover = _PLACEHOLDER.search(system_text)
    if leftover:
        raise AssertionError(f"unsubstituted placeholder {leftover.group()} in system prompt")

    description = suite.description(problem)
    user_text = (
        "# Problem Information\n"
        + description.strip()
        + "\n\n# Program Template\n```python\n"
        + _template("program_template.txt").rstrip()
        + "\n```\n"
    )
    return system_text, user_text


def assemble_feedback_prompt(
    problem: ProblemId,
    prior: IterationRecord,
    config: CampaignConfig,
    suite: ProblemSuite | None = None,
) -> tuple[str, str]:
    if not prior.samples or all(not s.cases and s.program_source is None for s in prior.samples):
        raise PreconditionError("feedback prompt requires records from a completed iteration")

    system_text, user_text = assemble_initial_prompt(problem, config, suite)

    parts = [user_text]
    parts.append(f"\n# Feedback from Previous Iteration (Iteration {prior.iteration})\n")
    parts.append("These are the test cases and results from the previous iteration:\n")
    multi = len(prior.samples) > 1
    for sample in prior.samples:
        if multi:
            parts.append(f"\n## Sample {sample.sample_index + 1}\n")
        if sample.program_source is not None:
            parts.append("\n**Program:**\n```python\n" + sample.program_source.rstrip() + "\n```\n")
        else:
            parts.append("\n**Program:** no usable program could be extracted from the response.\n")
        for case_no, case in enumerate(sample.cases, start=1):
            snippet = case.input_text
            if len(snippet) > _INPUT_SNIPPET_LIMIT:
                snippet = snippet[:_INPUT_SNIPPET_LIMIT] + "\n...[truncated]"
            parts.append(
                f"\n## Test Case {case_no}: {case.instance_id}\n"
                f"**Input File:**\n{snippet}\n"
                f"**Result:**\n{case.message}\n"
            )

    all_verified = all(s.all_verified for s in prior.samples)
    guidance = _template("guidance_passed.txt" if all_verified else "guidance_failed.txt")
    parts.append("\n" + guidance)
    return system_text, "".join(parts)


_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_SOLVE_TOKEN = re.compile(r"\bsolve\b")


def extract_program(model_response: str, iteration: int, sample_index: int) -> CandidateProgram:
    """Longest fenced code block, or the whole response when nothing is fenced."""
    if not model_response.strip():
        raise ExtractionError("empty model response", iteration, sample_index)
    blocks = _FENCE.findall(model_response)
    source = max(blocks, key=len) if blocks else model_response
    source = source.strip("\n")
    if not _SOLVE_TOKEN.search(source):
        raise ExtractionError(
            "response contains no `solve` entry point", iteration, sample_index
        )
    return CandidateProgram(source=source, iteration=iteration, sample_index=sample_index)
