"""Run one candidate program against one instance under resource limits.

Every execution gets a private working directory holding the candidate
source, the instance input and the (initially absent) output file.  The
candidate runs in a separate interpreter process through a small shim that
calls `solve(input_path, output_path)`; the wall clock is enforced by
killing the process group.  Captured texts have the working directory
rewritten to a fixed token so evidence is stable across runs.
"""

from __future__ import annotations

import hashlib
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .types import CandidateProgram, HarnessError, InstanceRef

SHIM_PATH = Path(__file__).with_name("_shim.py")
WORKDIR_TOKEN = "<run>"
CAPTURE_LIMIT = 64 * 1024

#: Environment variables forwarded to candidates (plus deterministic extras).
ENV_ALLOWLIST = ("PATH", "HOME", "LANG", "LC_ALL", "TMPDIR")


@dataclass(frozen=True)
class ResourceLimits:
    cpu_cores: int = 8
    timeout_s: float = 10.0
    grace_s: float = 2.0
    max_output_bytes: int = 64 * 1024 * 1024

    def __post_init__(self):
        if self.cpu_cores < 1 or self.timeout_s <= 0 or self.max_output_bytes < 1:
            raise ValueError("invalid resource limits")


@dataclass(frozen=True)
class ExecutionEvidence:
    exit_kind: str                      # "exited" | "timeout" | "launch_failure"
    exit_code: int | None
    stdout: str
    stderr: str
    wall_time_s: float
    output_state: str                   # "absent" | "empty" | "present"
    output_bytes: int
    output_text: str | None             # None unless present and within the size cap
    output_oversize: bool
    workdir: str | None = None          # retained only with keep_artifacts

    @property
    def launched(self) -> bool:
        return self.exit_kind != "launch_failure"

    @property
    def timed_out(self) -> bool:
        return self.exit_kind == "timeout"

    @property
    def output_created(self) -> bool:
        return self.output_state != "absent"

    def digest(self) -> dict:
        return {
            "exit_kind": self.exit_kind,
            "exit_code": self.exit_code,
            "output_state": self.output_state,
            "output_bytes": self.output_bytes,
            "stdout_sha256": hashlib.sha256(self.stdout.encode()).hexdigest(),
            "stderr_sha256": hashlib.sha256(self.stderr.encode()).hexdigest(),
        }


def default_runner() -> str:
    """Interpreter command template with {source}/{input}/{output} placeholders."""
    return f"{sys.executable} -I {SHIM_PATH} {{source}} {{input}} {{output}}"


def _scrubbed_env(limits: ResourceLimits) -> dict[str, str]:
    env = {k: os.environ[k] for k in ENV_ALLOWLIST if k in os.environ}
    env["PYTHONHASHSEED"] = "0"  # set iteration order must not vary across runs
    cores = str(limits.cpu_cores)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        env[var] = cores
    return env


def _limit_cpu_affinity(pid: int, cpu_cores: int) -> None:
    """Best effort: restrict the child to cpu_cores logical CPUs (Linux only).

    Applied after spawn rather than via preexec_fn, which is unsafe when the
    caller runs executions from worker threads; the limit is advisory.
    """
    if not hasattr(os, "sched_setaffinity"):
        return
    try:
        available = sorted(os.sched_getaffinity(0))
        subset = set(available[: max(1, min(cpu_cores, len(available)))])
        os.sched_setaffinity(pid, subset)
    except OSError:
        pass


def _normalize(text: bytes, workdir: str) -> str:
    out = text.decode("utf-8", errors="replace")
    if len(out) > CAPTURE_LIMIT:
        out = out[:CAPTURE_LIMIT] + "\n...[truncated]"
    return out.replace(workdir, WORKDIR_TOKEN)


def execute_candidate(
    program: CandidateProgram,
    instance: InstanceRef,
    limits: ResourceLimits,
    runner: str | None = None,
    keep_artifacts: bool = False,
) -> ExecutionEvidence:
    runner = runner or default_runner()
    try:
        workdir = tempfile.mkdtemp(prefix="cobench-run-")
    except OSError as exc:
        raise HarnessError(f"cannot allocate working directory: {exc}") from exc

    try:
        source_path = os.path.join(workdir, "candidate.py")
        input_path = os.path.join(workdir, "input.txt")
        output_path = os.path.join(workdir, "output.txt")
        with open(source_path, "w", encoding="utf-8") as fh:
            fh.write(program.source)
        with open(input_path, "wb") as fh:
            fh.write(instance.payload)

        argv = [
            part.format(source=source_path, input=input_path, output=output_path)
            for part in runner.split()
        ]
        started = time.monotonic()
        try:
            proc = subprocess.Popen(
                argv,
                cwd=workdir,
                env=_scrubbed_env(limits),
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                start_new_session=True,
            )
            _limit_cpu_affinity(proc.pid, limits.cpu_cores)
        except OSError as exc:
            wall = time.monotonic() - started
            return _finish(
                workdir, keep_artifacts, output_path, limits,
                exit_kind="launch_failure", exit_code=None,
                stdout="", stderr=_normalize(str(exc).encode(), workdir), wall=wall,
            )

        timed_out = False
        try:
            out_b, err_b = proc.communicate(timeout=limits.timeout_s)
        except subprocess.TimeoutExpired:
            timed_out = True
            _kill_group(proc)
            try:
                out_b, err_b = proc.communicate(timeout=max(limits.grace_s, 0.1))
            except subprocess.TimeoutExpired:
                proc.kill()
                out_b, err_b = proc.communicate()
        wall = time.monotonic() - started

        return _finish(
            workdir, keep_artifacts, output_path, limits,
            exit_kind="timeout" if timed_out else "exited",
            exit_code=None if timed_out else proc.returncode,
            stdout=_normalize(out_b or b"", workdir),
            stderr=_normalize(err_b or b"", workdir),
            wall=wall,
        )
    finally:
        if not keep_artifacts:
            shutil.rmtree(workdir, ignore_errors=True)


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError, OSError):
        proc.kill()


def _finish(workdir: str, keep: bool, output_path: str, limits: ResourceLimits,
            *, exit_kind: str, exit_code: int | None, stdout: str, stderr: str,
            wall: float) -> ExecutionEvidence:
    state = "absent"
    nbytes = 0
    text: str | None = None
    oversize = False
    if os.path.isfile(output_path):
        nbytes = os.path.getsize(output_path)
        if nbytes == 0:
            state = "empty"
        else:
            state = "present"
            if nbytes > limits.max_output_bytes:
                oversize = True
            else:
                with open(output_path, "rb") as fh:
                    text = fh.read().decode("utf-8", errors="replace")
    return ExecutionEvidence(
        exit_kind=exit_kind,
        exit_code=exit_code,
        stdout=stdout,
        stderr=stderr,
        wall_time_s=wall,
        output_state=state,
        output_bytes=nbytes,
        output_text=text,
        output_oversize=oversize,
        workdir=workdir if keep else None,
    )
