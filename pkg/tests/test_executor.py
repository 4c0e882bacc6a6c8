from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from cobench.executor import ResourceLimits, execute_candidate
from cobench.types import CandidateProgram, InstanceRef, ProblemId, Split

COPY = CandidateProgram(
    source=(
        "def solve(input_file, output_file):\n"
        "    with open(input_file, 'rb') as i, open(output_file, 'wb') as o:\n"
        "        o.write(i.read())\n"
    ),
    iteration=1,
)

SLEEPER = CandidateProgram(
    source=(
        "import time\n"
        "def solve(input_file, output_file):\n"
        "    time.sleep(TIMEOUT * 2)\n"
        "    open(output_file, 'w').write('late')\n"
    ),
    iteration=1,
)

IMPORT_ERROR = CandidateProgram(
    source="import definitely_not_a_module\n\ndef solve(a, b):\n    pass\n",
    iteration=1,
)


def _instance(payload: bytes = b"x" * 1024) -> InstanceRef:
    return InstanceRef(
        problem=ProblemId.OPERATOR_SCHEDULING,
        instance_id="unit",
        split=Split.DEMO,
        payload=payload,
    )


def _sleeper(timeout: float) -> CandidateProgram:
    return CandidateProgram(
        source=SLEEPER.source.replace("TIMEOUT", repr(timeout)), iteration=1
    )


def test_copy_program_round_trips_output():
    limits = ResourceLimits(timeout_s=15.0)
    ev = execute_candidate(COPY, _instance(), limits)
    assert ev.exit_kind == "exited" and ev.exit_code == 0
    assert ev.output_state == "present"
    assert ev.output_bytes == 1024
    assert ev.wall_time_s < limits.timeout_s


def test_sleeper_killed_within_grace():
    limits = ResourceLimits(timeout_s=0.4, grace_s=2.0)
    ev = execute_candidate(_sleeper(limits.timeout_s), _instance(), limits)
    assert ev.exit_kind == "timeout"
    assert ev.output_state == "absent"
    assert ev.wall_time_s <= limits.timeout_s + limits.grace_s


def test_import_error_keeps_stderr_and_no_output():
    ev = execute_candidate(IMPORT_ERROR, _instance(), ResourceLimits(timeout_s=15.0))
    assert ev.exit_kind == "exited" and ev.exit_code != 0
    assert ev.output_state == "absent"
    assert "definitely_not_a_module" in ev.stderr


def test_workdir_paths_are_normalized_out_of_stderr():
    crasher = CandidateProgram(
        source="def solve(a, b):\n    raise RuntimeError('pop')\n", iteration=1
    )
    ev = execute_candidate(crasher, _instance(), ResourceLimits(timeout_s=15.0))
    assert "cobench-run-" not in ev.stderr
    assert "<run>" in ev.stderr
    assert "RuntimeError: pop" in ev.stderr


def test_environment_is_scrubbed_to_allowlist():
    probe = CandidateProgram(
        source=(
            "import os\n"
            "def solve(a, b):\n"
            "    open(b, 'w').write(os.environ.get('COBENCH_SECRET_PROBE', 'unset'))\n"
        ),
        iteration=1,
    )
    os.environ["COBENCH_SECRET_PROBE"] = "leaky"
    try:
        ev = execute_candidate(probe, _instance(), ResourceLimits(timeout_s=15.0))
    finally:
        del os.environ["COBENCH_SECRET_PROBE"]
    assert ev.output_text == "unset"


def test_oversize_output_flagged():
    fat = CandidateProgram(
        source="def solve(a, b):\n    open(b, 'wb').write(b'z' * 2048)\n", iteration=1
    )
    ev = execute_candidate(fat, _instance(), ResourceLimits(timeout_s=15.0, max_output_bytes=1024))
    assert ev.output_state == "present"
    assert ev.output_oversize


def test_concurrent_executions_are_isolated():
    writer = CandidateProgram(
        source=(
            "import os\n"
            "def solve(a, b):\n"
            "    open(b, 'w').write(os.getcwd())\n"
        ),
        iteration=1,
    )
    limits = ResourceLimits(timeout_s=15.0)
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda _: execute_candidate(writer, _instance(), limits), range(4)))
    cwds = [ev.output_text for ev in results]
    assert len(set(cwds)) == 4  # every run saw its own working directory


def test_keep_artifacts_retains_workdir():
    ev = execute_candidate(COPY, _instance(), ResourceLimits(timeout_s=15.0), keep_artifacts=True)
    assert ev.workdir is not None and os.path.isdir(ev.workdir)
    assert os.path.exists(os.path.join(ev.workdir, "candidate.py"))
    import shutil

    shutil.rmtree(ev.workdir)


def test_instance_payload_never_modified():
    scribbler = CandidateProgram(
        source=(
            "def solve(a, b):\n"
            "    open(a, 'w').write('vandalized')\n"
            "    open(b, 'w').write('done')\n"
        ),
        iteration=1,
    )
    ref = _instance(b"precious")
    execute_candidate(scribbler, ref, ResourceLimits(timeout_s=15.0))
    assert ref.payload == b"precious"  # candidate only ever sees a copy


def test_digest_is_deterministic_across_runs():
    e1 = execute_candidate(COPY, _instance(), ResourceLimits(timeout_s=15.0))
    e2 = execute_candidate(COPY, _instance(), ResourceLimits(timeout_s=15.0))
    assert e1.digest() == e2.digest()


def test_output_state_reflects_termination_instant():
    # Writes the output early, then overruns the clock: the evidence must
    # still show the file that existed when the process was killed.
    early_writer = CandidateProgram(
        source=(
            "import time\n"
            "def solve(a, b):\n"
            "    open(b, 'w').write('partial')\n"
            "    time.sleep(30)\n"
        ),
        iteration=1,
    )
    limits = ResourceLimits(timeout_s=0.4, grace_s=2.0)
    ev = execute_candidate(early_writer, _instance(), limits)
    assert ev.exit_kind == "timeout"
    assert ev.output_state == "present"
    assert ev.output_text == "partial"


def test_budget_enforced_in_100_of_100_timeout_runs():
    limits = ResourceLimits(timeout_s=0.15, grace_s=2.0)
    program = _sleeper(limits.timeout_s)

    def run(_):
        return execute_candidate(program, _instance(), limits)

    with ThreadPoolExecutor(max_workers=8) as pool:
        evidences = list(pool.map(run, range(100)))
    assert len(evidences) == 100
    for ev in evidences:
        assert ev.exit_kind == "timeout"
        assert ev.wall_time_s <= limits.timeout_s + limits.grace_s
