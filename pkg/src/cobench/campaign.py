"""The iterative refinement loop.

Per iteration: assemble the prompt (initial on the first pass, feedback
afterwards), draw k candidate programs from the model client, execute every
sample on every demo instance, classify and log.  After the final iteration
the program with the best demo QYI (ties: lower verified-cost sum, then the
latest iteration/sample) runs once on the held-out eval split.

Executions inside an iteration may run on a small thread pool; entries are
logged in canonical (iteration, sample, instance) order regardless of
completion order, and an endpoint failure aborts the campaign with the
partial log preserved.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .classify import classify_stage
from .executor import ExecutionEvidence, ResourceLimits, execute_candidate
from .llm import ChatClient, ChatTurn, EndpointError
from .log import CampaignLog, LogBuilder
from .metrics import ReferenceCosts, cost_ratio, qyi
from .problems import ProblemAdapter, get_adapter
from .prompts import (
    CaseResult,
    IterationRecord,
    SampleRecord,
    assemble_feedback_prompt,
    assemble_initial_prompt,
    extract_program,
    outcome_message,
)
from .suite import ProblemSuite
from .types import (
    CampaignConfig,
    CandidateProgram,
    ConfigurationError,
    ExtractionError,
    FormatCheck,
    InstanceRef,
    LogEntry,
    SolutionFormatError,
    StageOutcome,
    StageTag,
    VerifyResult,
)


def run_pipeline(
    program: CandidateProgram,
    instance: InstanceRef,
    adapter: ProblemAdapter,
    parsed_instance,
    limits: ResourceLimits,
    runner: str | None = None,
    keep_artifacts: bool = False,
) -> tuple[StageOutcome, ExecutionEvidence]:
    """Execute, parse, verify and evaluate one candidate on one instance."""
    evidence = execute_candidate(program, instance, limits, runner, keep_artifacts)
    format_ok: FormatCheck | None = None
    verify_result: VerifyResult | None = None
    ready = (
        evidence.launched
        and not evidence.timed_out
        and evidence.exit_code == 0
        and evidence.output_state == "present"
        and not evidence.output_oversize
    )
    if ready:
        try:
            solution = adapter.parse_solution(parsed_instance, evidence.output_text or "")
            format_ok = FormatCheck(True)
        except SolutionFormatError as exc:
            format_ok = FormatCheck(False, str(exc))
        if format_ok.ok:
            violations = adapter.verify(parsed_instance, solution)
            if violations:
                verify_result = VerifyResult(violations=tuple(violations))
            else:
                cost = adapter.evaluate(parsed_instance, solution)
                verify_result = VerifyResult(cost=float(cost))
    return classify_stage(evidence, format_ok, verify_result), evidence


def _extraction_failure_outcome(exc: ExtractionError) -> StageOutcome:
    return StageOutcome(
        tag=StageTag.FAIL_I,
        detail=f"program extraction failed: {exc}",
        error_category="other",
    )


def _program_score(
    entries: list[LogEntry], num_demos: int, refs: ReferenceCosts, capped: bool = True
) -> tuple[float, float]:
    """(demo QYI, verified cost sum) of one candidate program's records."""
    verified = {e.instance_id: e.outcome.cost for e in entries if e.outcome.verified}
    if num_demos == 0 or not verified:
        return 0.0, 0.0
    quality = sum(
        cost_ratio(refs.expert(iid), cost, refs.sense, capped)
        for iid, cost in verified.items()
    ) / len(verified)
    yield_ = len(verified) / num_demos
    return qyi(quality, yield_), sum(verified.values())


def run_campaign(
    config: CampaignConfig,
    model_client: ChatClient,
    suite: ProblemSuite | None = None,
    workers: int = 1,
    keep_artifacts: bool = False,
    runner: str | None = None,
) -> CampaignLog:
    suite = suite or ProblemSuite()
    problem = config.problem
    adapter = get_adapter(problem)

    demos_all = sorted(suite.demo_instances(problem), key=lambda r: r.instance_id)
    if config.num_demos > len(demos_all):
        raise ConfigurationError(
            f"num_demos={config.num_demos} exceeds the {len(demos_all)} bundled demo instances"
        )
    if config.num_demos == 0 and config.iterations > 1:
        raise ConfigurationError("feedback iterations need at least one demo instance")
    demos = demos_all[: config.num_demos]
    evals = sorted(suite.eval_instances(problem), key=lambda r: r.instance_id)

    refs = ReferenceCosts(sense=adapter.sense, costs=suite.reference_costs(problem))
    for ref in demos + evals:
        refs.expert(ref.instance_id)  # fail fast when reference coverage is incomplete

    parsed = {ref.instance_id: adapter.parse_instance(ref.payload) for ref in demos + evals}
    limits = ResourceLimits(cpu_cores=config.cpu_cores, timeout_s=config.resolved_timeout_s())

    builder = LogBuilder(problem=problem, config=config.to_dict())
    programs: dict[tuple[int, int], CandidateProgram] = {}
    prior: IterationRecord | None = None

    for iteration in range(1, config.iterations + 1):
        if iteration == 1 or prior is None:
            system_text, user_text = assemble_initial_prompt(problem, config, suite)
        else:
            system_text, user_text = assemble_feedback_prompt(problem, prior, config, suite)
        turns = [ChatTurn("system", system_text), ChatTurn("user", user_text)]
        try:
            responses = model_client.complete(
                turns, config.temperature, config.samples_per_iteration
            )
        except EndpointError as exc:
            builder.transcripts.append(
                {"iteration": iteration, "system": system_text, "user": user_text,
                 "responses": []}
            )
            builder.aborted = f"model endpoint failed at iteration {iteration}: {exc}"
            return builder.freeze()
        builder.transcripts.append(
            {"iteration": iteration, "system": system_text, "user": user_text,
             "responses": list(responses)}
        )

        samples: list[SampleRecord] = []
        for sample_index, response in enumerate(responses):
            try:
                program = extract_program(response, iteration, sample_index)
            except ExtractionError as exc:
                outcome = _extraction_failure_outcome(exc)
                for ref in demos:
                    builder.entries.append(
                        LogEntry(ref.instance_id, iteration, sample_index, outcome, {})
                    )
                samples.append(
                    SampleRecord(
                        sample_index=sample_index,
                        program_source=None,
                        cases=tuple(
                            CaseResult(ref.instance_id, ref.payload_text(), outcome_message(outcome))
                            for ref in demos
                        ),
                        all_verified=False,
                    )
                )
                continue

            programs[(iteration, sample_index)] = program
            outcomes = _run_on_instances(
                program, demos, adapter, parsed, limits, workers, runner, keep_artifacts
            )
            cases = []
            for ref in demos:
                outcome, digest = outcomes[ref.instance_id]
                builder.entries.append(
                    LogEntry(ref.instance_id, iteration, sample_index, outcome, digest)
                )
                cases.append(
                    CaseResult(ref.instance_id, ref.payload_text(), outcome_message(outcome))
                )
            samples.append(
                SampleRecord(
                    sample_index=sample_index,
                    program_source=program.source,
                    cases=tuple(cases),
                    all_verified=bool(demos)
                    and all(outcomes[r.instance_id][0].verified for r in demos),
                )
            )
        prior = IterationRecord(iteration=iteration, samples=tuple(samples))

    selected = _select_best(builder.entries, programs, len(demos), refs)
    if selected is not None:
        iteration, sample_index = selected
        builder.selected = {"iteration": iteration, "sample_index": sample_index}
        program = programs[(iteration, sample_index)]
        outcomes = _run_on_instances(
            program, evals, adapter, parsed, limits, workers, runner, keep_artifacts
        )
        for ref in evals:
            outcome, digest = outcomes[ref.instance_id]
            builder.eval_entries.append(
                LogEntry(ref.instance_id, iteration, sample_index, outcome, digest)
            )
    return builder.freeze()


def _run_on_instances(
    program: CandidateProgram,
    instances: list[InstanceRef],
    adapter: ProblemAdapter,
    parsed: dict,
    limits: ResourceLimits,
    workers: int,
    runner: str | None,
    keep_artifacts: bool,
) -> dict[str, tuple[StageOutcome, dict]]:
    def one(ref: InstanceRef):
        outcome, evidence = run_pipeline(
            program, ref, adapter, parsed[ref.instance_id], limits, runner, keep_artifacts
        )
        return ref.instance_id, (outcome, evidence.digest())

    if workers <= 1 or len(instances) <= 1:
        return dict(one(ref) for ref in instances)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(one, instances))


def _select_best(
    entries: list[LogEntry],
    programs: dict[tuple[int, int], CandidateProgram],
    num_demos: int,
    refs: ReferenceCosts,
) -> tuple[int, int] | None:
    if not programs:
        return None
    by_program: dict[tuple[int, int], list[LogEntry]] = {key: [] for key in programs}
    for entry in entries:
        key = (entry.iteration, entry.sample_index)
        if key in by_program:
            by_program[key].append(entry)

    def sort_key(key: tuple[int, int]):
        score, cost_sum = _program_score(by_program[key], num_demos, refs)
        return (score, -cost_sum, key)

    return max(sorted(programs), key=sort_key)
