"""Three-stage outcome classification.

Ordered rules: launch/startup failures and crashes that never produced an
output file are stage-I failures; timeouts, missing/empty/oversized output
and format-invalid output are stage-II; verifier violations are stage-III;
anything else is Verified and carries the evaluator's cost.  A crash that
happened after the output file was already created counts as stage II, not
stage I (the run launched fine but left no valid output).
"""

from __future__ import annotations

from .executor import ExecutionEvidence
from .types import FormatCheck, StageOutcome, StageTag, VerifyResult

_MAX_VIOLATIONS_IN_DETAIL = 10
_STDERR_TAIL_LINES = 15


def _stderr_tail(evidence: ExecutionEvidence) -> str:
    lines = evidence.stderr.strip().splitlines()
    return "\n".join(lines[-_STDERR_TAIL_LINES:])


def _crash_category(evidence: ExecutionEvidence) -> str:
    if "ModuleNotFoundError" in evidence.stderr or "ImportError" in evidence.stderr:
        return "hallucinated_api"
    return "other"


def classify_stage(
    evidence: ExecutionEvidence,
    format_ok: FormatCheck | None = None,
    verify_result: VerifyResult | None = None,
) -> StageOutcome:
    if not evidence.launched:
        return StageOutcome(
            tag=StageTag.FAIL_I,
            detail="failed to launch: " + (evidence.stderr or "unknown launch error"),
            error_category="other",
        )
    if evidence.timed_out:
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail="process killed at the wall-clock limit",
            error_category="timeout",
        )
    if evidence.exit_code != 0:
        if not evidence.output_created:
            return StageOutcome(
                tag=StageTag.FAIL_I,
                detail="process exited with an error before writing any output:\n"
                + _stderr_tail(evidence),
                error_category=_crash_category(evidence),
            )
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail="process crashed after creating the output file:\n" + _stderr_tail(evidence),
            error_category="logic",
        )
    if evidence.output_state == "absent":
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail="no output file was produced",
            error_category="logic",
        )
    if evidence.output_state == "empty":
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail="output file is empty",
            error_category="logic",
        )
    if evidence.output_oversize:
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail=f"output file exceeds the size cap ({evidence.output_bytes} bytes)",
            error_category="logic",
        )
    if format_ok is None or not format_ok.ok:
        detail = format_ok.detail if format_ok is not None else "output was never parsed"
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail=f"output does not match the solution format: {detail}",
            error_category="logic",
        )
    if verify_result is None:
        return StageOutcome(
            tag=StageTag.FAIL_II,
            detail="solution was never verified",
            error_category="logic",
        )
    if verify_result.violations:
        shown = list(verify_result.violations[:_MAX_VIOLATIONS_IN_DETAIL])
        extra = len(verify_result.violations) - len(shown)
        if extra > 0:
            shown.append(f"... and {extra} more violations")
        return StageOutcome(
            tag=StageTag.FAIL_III,
            detail="; ".join(shown),
            error_category="constraint",
        )
    assert verify_result.cost is not None, "feasible solutions must carry a cost"
    return StageOutcome(tag=StageTag.VERIFIED, cost=verify_result.cost)
