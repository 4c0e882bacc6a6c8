from __future__ import annotations

import itertools

from cobench.classify import classify_stage
from cobench.executor import ExecutionEvidence
from cobench.types import FormatCheck, StageTag, VerifyResult


def _evidence(**over) -> ExecutionEvidence:
    base = dict(
        exit_kind="exited",
        exit_code=0,
        stdout="",
        stderr="",
        wall_time_s=0.1,
        output_state="present",
        output_bytes=10,
        output_text="payload",
        output_oversize=False,
    )
    base.update(over)
    return ExecutionEvidence(**base)


OK_FORMAT = FormatCheck(True)
OK_VERIFY = VerifyResult(cost=4.0)


def test_launch_failure_is_stage_one():
    ev = _evidence(exit_kind="launch_failure", exit_code=None, output_state="absent",
                   output_bytes=0, output_text=None, stderr="no such interpreter")
    out = classify_stage(ev)
    assert out.tag is StageTag.FAIL_I


def test_import_error_without_output_is_stage_one_hallucinated_api():
    ev = _evidence(exit_code=1, output_state="absent", output_bytes=0, output_text=None,
                   stderr="ModuleNotFoundError: No module named 'ortools'")
    out = classify_stage(ev)
    assert out.tag is StageTag.FAIL_I
    assert out.error_category == "hallucinated_api"


def test_timeout_is_stage_two_with_timeout_category():
    ev = _evidence(exit_kind="timeout", exit_code=None, output_state="present")
    out = classify_stage(ev)
    assert out.tag is StageTag.FAIL_II
    assert out.error_category == "timeout"


def test_crash_after_output_created_is_stage_two():
    ev = _evidence(exit_code=1, output_state="present",
                   stderr="Traceback...\nValueError: boom")
    out = classify_stage(ev)
    assert out.tag is StageTag.FAIL_II


def test_absent_and_empty_output_are_stage_two():
    for state in ("absent", "empty"):
        ev = _evidence(output_state=state, output_bytes=0, output_text=None)
        assert classify_stage(ev).tag is StageTag.FAIL_II


def test_oversize_output_is_stage_two():
    ev = _evidence(output_oversize=True, output_text=None, output_bytes=10**9)
    assert classify_stage(ev).tag is StageTag.FAIL_II


def test_format_failure_is_stage_two():
    out = classify_stage(_evidence(), FormatCheck(False, "expected node:cycle"))
    assert out.tag is StageTag.FAIL_II
    assert "node:cycle" in out.detail


def test_violations_are_stage_three_with_detail():
    out = classify_stage(_evidence(), OK_FORMAT, VerifyResult(violations=("dep broken",)))
    assert out.tag is StageTag.FAIL_III
    assert "dep broken" in out.detail
    assert out.error_category == "constraint"


def test_verified_carries_cost():
    out = classify_stage(_evidence(), OK_FORMAT, OK_VERIFY)
    assert out.tag is StageTag.VERIFIED
    assert out.cost == 4.0


def test_stage_order_is_monotone_over_evidence_space():
    """Verified requires format ok, format ok requires output, output requires launch."""
    kinds = ["launch_failure", "timeout", "exited"]
    codes = [0, 1]
    states = ["absent", "empty", "present"]
    formats = [None, FormatCheck(False, "bad"), OK_FORMAT]
    verifies = [None, VerifyResult(violations=("v",)), OK_VERIFY]
    for kind, code, state, fmt, ver in itertools.product(kinds, codes, states, formats, verifies):
        ev = _evidence(
            exit_kind=kind,
            exit_code=None if kind != "exited" else code,
            output_state=state,
            output_bytes=0 if state != "present" else 5,
            output_text="x" if state == "present" else None,
        )
        out = classify_stage(ev, fmt, ver)
        if out.tag is StageTag.VERIFIED:
            assert kind == "exited" and code == 0 and state == "present"
            assert fmt is OK_FORMAT and ver is OK_VERIFY
        if out.tag in (StageTag.FAIL_III, StageTag.VERIFIED):
            assert state == "present" and kind == "exited"
