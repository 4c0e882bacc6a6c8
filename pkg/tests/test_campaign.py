from __future__ import annotations

import json

import pytest

from cobench.campaign import run_campaign
from cobench.llm import ReplayClient
from cobench.log import CampaignLog
from cobench.metrics import ReferenceCosts, compute_report
from cobench.problems import get_adapter
from cobench.suite import ProblemSuite
from cobench.types import CampaignConfig, ConfigurationError, ProblemId, StageTag

SCHED = ProblemId.OPERATOR_SCHEDULING

GOOD_SCHEDULER = '''```python
import json

def solve(input_file: str, solution_file: str):
    with open(input_file) as fh:
        doc = json.load(fh)
    delay = doc["delay"]
    rtype = dict((n, t) for n, t in doc["nodes"])
    preds = {n: [] for n in rtype}
    for src, dst, _ in doc["edges"]:
        preds[dst].append(src)
    start = {}
    busy = {}
    remaining = set(rtype)
    while remaining:
        ready = sorted(n for n in remaining if all(p in start for p in preds[n]))
        n = ready[0]
        remaining.discard(n)
        t = max((start[p] + delay[rtype[p]] for p in preds[n]), default=0)
        while True:
            cells = [(rtype[n], c) for c in range(t, t + delay[rtype[n]])]
            if all(busy.get(cell, 0) < doc["resource"][rtype[n]] for cell in cells):
                for cell in cells:
                    busy[cell] = busy.get(cell, 0) + 1
                start[n] = t
                break
            t += 1
    with open(solution_file, "w") as fh:
        for n in sorted(start):
            fh.write(f"{n}:{start[n]}\\n")
```'''

EMPTY_WRITER = "```python\ndef solve(a, b):\n    open(b, 'w').write('')\n```"

NO_SOLVE = "I am unable to write code for this."


def _config(**over) -> CampaignConfig:
    base = dict(problem=SCHED, iterations=2, num_demos=3, timeout_s=20.0)
    base.update(over)
    return CampaignConfig(**base)


@pytest.fixture(scope="module")
def suite():
    return ProblemSuite()


def test_campaign_log_shape_and_feedback(suite):
    client = ReplayClient([EMPTY_WRITER, GOOD_SCHEDULER])
    log = run_campaign(_config(), client, suite)
    assert log.iterations() == [1, 2]
    assert len(log.entries) == 2 * 3  # iterations x demos
    assert len(log.instance_ids()) == 3
    # iteration 1 all Fail_II (empty output), iteration 2 verified
    for entry in log.entries_at(1):
        assert entry.outcome.tag is StageTag.FAIL_II
    assert any(e.outcome.verified for e in log.entries_at(2))
    # feedback prompt was assembled for iteration 2 and carries case 1 guidance
    assert len(log.transcripts) == 2
    assert "The program failed to produce valid solutions" in log.transcripts[1]["user"]


def test_single_iteration_never_assembles_feedback(suite):
    client = ReplayClient([GOOD_SCHEDULER])
    log = run_campaign(_config(iterations=1), client, suite)
    assert len(log.transcripts) == 1
    assert "Feedback from Previous Iteration" not in log.transcripts[0]["user"]


def test_extraction_failure_records_fail_i_for_every_demo(suite):
    client = ReplayClient([NO_SOLVE, GOOD_SCHEDULER])
    log = run_campaign(_config(), client, suite)
    first = log.entries_at(1)
    assert len(first) == 3
    assert all(e.outcome.tag is StageTag.FAIL_I for e in first)
    assert all("extraction" in e.outcome.detail for e in first)


def test_eval_split_runs_best_program(suite):
    client = ReplayClient([EMPTY_WRITER, GOOD_SCHEDULER])
    log = run_campaign(_config(), client, suite)
    assert log.selected == {"iteration": 2, "sample_index": 0}
    eval_ids = {e.instance_id for e in log.eval_entries}
    assert eval_ids == {r.instance_id for r in suite.eval_instances(SCHED)}
    assert all(e.iteration == 2 for e in log.eval_entries)


def test_campaign_aborts_preserving_partial_log(suite):
    client = ReplayClient([GOOD_SCHEDULER])  # exhausted on iteration 2
    log = run_campaign(_config(), client, suite)
    assert log.aborted is not None and "iteration 2" in log.aborted
    assert len(log.entries) == 3  # iteration 1 still recorded
    assert log.eval_entries == ()


def test_campaign_rejects_too_many_demos(suite):
    with pytest.raises(ConfigurationError):
        run_campaign(_config(num_demos=99), ReplayClient([GOOD_SCHEDULER]), suite)


def test_campaign_is_deterministic_and_reloadable(suite, tmp_path):
    logs = []
    for _ in range(2):
        client = ReplayClient([EMPTY_WRITER, GOOD_SCHEDULER])
        logs.append(run_campaign(_config(), client, suite))
    assert logs[0].to_json() == logs[1].to_json()

    path = tmp_path / "log.json"
    logs[0].save(path)
    reloaded = CampaignLog.load(path)
    assert reloaded.to_json() == logs[0].to_json()

    refs = ReferenceCosts(
        sense=get_adapter(SCHED).sense, costs=suite.reference_costs(SCHED)
    )
    a = compute_report(logs[0], refs)
    b = compute_report(reloaded, refs)
    assert a == b


def test_best_of_n_samples_logged_and_labeled(suite):
    # two samples per iteration, one iteration: empty writer + good scheduler
    client = ReplayClient([EMPTY_WRITER, GOOD_SCHEDULER])
    config = _config(iterations=1, samples_per_iteration=2)
    log = run_campaign(config, client, suite)
    assert len(log.entries) == 3 * 2
    assert {e.sample_index for e in log.entries} == {0, 1}
    # selection picks the verified sample
    assert log.selected == {"iteration": 1, "sample_index": 1}


def test_feedback_includes_all_samples_under_best_of_n(suite):
    client = ReplayClient([EMPTY_WRITER, GOOD_SCHEDULER, GOOD_SCHEDULER, GOOD_SCHEDULER])
    config = _config(iterations=2, samples_per_iteration=2)
    log = run_campaign(config, client, suite)
    feedback = log.transcripts[1]["user"]
    assert "## Sample 1" in feedback and "## Sample 2" in feedback


def test_secret_never_reaches_serialized_log(suite, monkeypatch):
    secret = "hunter2-super-secret"
    monkeypatch.setenv("COBENCH_API_KEY", secret)
    client = ReplayClient([GOOD_SCHEDULER])
    log = run_campaign(_config(iterations=1), client, suite)
    assert secret not in log.to_json()


def test_schema_version_guard(tmp_path, suite):
    client = ReplayClient([GOOD_SCHEDULER])
    log = run_campaign(_config(iterations=1), client, suite)
    doc = json.loads(log.to_json())
    doc["schema"] = 999
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ValueError):
        CampaignLog.load(bad)
