from __future__ import annotations

import json

import pytest

from cobench.log import CampaignLog
from cobench.metrics import ReferenceCosts
from cobench.suite import ProblemSuite
from cobench.types import LogEntry, ObjectiveSense, ProblemId, StageOutcome, StageTag


@pytest.fixture(scope="session")
def suite() -> ProblemSuite:
    return ProblemSuite()


SCHED_EXAMPLE = json.dumps(
    {
        "name": "input",
        "delay": {"mul": 3, "sub": 1},
        "resource": {"mul": 2, "sub": 1},
        "nodes": [["n1", "mul"], ["n2", "mul"], ["n3", "sub"]],
        "edges": [["n1", "n3", "lhs"], ["n2", "n3", "rhs"]],
    }
).encode()


def outcome(tag: StageTag, cost: float | None = None) -> StageOutcome:
    if tag is StageTag.VERIFIED:
        return StageOutcome(tag=tag, cost=cost if cost is not None else 1.0)
    detail = "synthetic violation" if tag is StageTag.FAIL_III else "synthetic"
    return StageOutcome(tag=tag, detail=detail)


def synth_log(
    problem: ProblemId,
    records: dict[tuple[str, int, int], StageOutcome],
    config: dict | None = None,
) -> CampaignLog:
    entries = tuple(
        LogEntry(instance_id=iid, iteration=t, sample_index=j, outcome=oc)
        for (iid, t, j), oc in sorted(records.items())
    )
    return CampaignLog(problem=problem, config=config or {}, entries=entries)


def synth_refs(costs: dict[str, float], sense=ObjectiveSense.MINIMIZE) -> ReferenceCosts:
    return ReferenceCosts(sense=sense, costs=costs)
