from __future__ import annotations

import random

import pytest

from cobench.baselines import oracles
from cobench.datagen import gen_tiny_scheduling
from cobench.problems import scheduling
from cobench.types import InstanceFormatError, SolutionFormatError

from conftest import SCHED_EXAMPLE


@pytest.fixture()
def example():
    return scheduling.parse_instance(SCHED_EXAMPLE)


def test_worked_example_feasible_latency_4(example):
    sched = scheduling.parse_solution(example, "n1:0\nn2:0\nn3:3\n")
    assert scheduling.verify(example, sched) == []
    assert scheduling.evaluate(example, sched) == 4.0


def test_early_start_is_dependency_violation(example):
    sched = scheduling.parse_solution(example, "n1:0\nn2:0\nn3:2\n")
    violations = scheduling.verify(example, sched)
    assert violations and all("dependency" in v for v in violations)


def test_resource_oversubscription_detected(example):
    tight = scheduling.SchedInstance(
        name=example.name,
        delay=example.delay,
        resource={"mul": 1, "sub": 1},
        nodes=example.nodes,
        edges=example.edges,
    )
    sched = scheduling.parse_solution(tight, "n1:0\nn2:0\nn3:3\n")
    violations = scheduling.verify(tight, sched)
    assert any("resource 'mul'" in v and "cycle 0" in v for v in violations)
    assert sum("resource 'mul'" in v for v in violations) == 3  # cycles 0..2


def test_single_node_latency():
    inst = scheduling.parse_instance(
        b'{"name":"x","delay":{"a":1},"resource":{"a":1},"nodes":[["n","a"]],"edges":[]}'
    )
    sched = scheduling.parse_solution(inst, "n:0")
    assert scheduling.verify(inst, sched) == []
    assert scheduling.evaluate(inst, sched) == 1.0


def test_empty_node_set_latency_zero():
    inst = scheduling.parse_instance(
        b'{"name":"x","delay":{"a":1},"resource":{"a":1},"nodes":[],"edges":[]}'
    )
    assert scheduling.evaluate(inst, scheduling.Schedule(start={})) == 0.0


def test_duplicate_assignment_is_violation(example):
    sched = scheduling.parse_solution(example, "n1:0\nn1:1\nn2:0\nn3:3\n")
    assert any("more than once" in v for v in scheduling.verify(example, sched))


def test_unknown_and_missing_nodes_are_violations(example):
    sched = scheduling.parse_solution(example, "n1:0\nn2:0\nbogus:1\n")
    violations = scheduling.verify(example, sched)
    assert any("unknown node" in v for v in violations)
    assert any("missing" in v for v in violations)


def test_malformed_solution_lines_raise(example):
    with pytest.raises(SolutionFormatError):
        scheduling.parse_solution(example, "n1 0\n")
    with pytest.raises(SolutionFormatError):
        scheduling.parse_solution(example, "n1:x\n")
    with pytest.raises(SolutionFormatError):
        scheduling.parse_solution(example, "\n\n")


def test_cyclic_instance_rejected():
    doc = (
        b'{"name":"x","delay":{"a":1},"resource":{"a":1},'
        b'"nodes":[["p","a"],["q","a"]],"edges":[["p","q","e"],["q","p","f"]]}'
    )
    with pytest.raises(InstanceFormatError):
        scheduling.parse_instance(doc)


def test_verifier_matches_bruteforce_feasible_set():
    rng = random.Random(42)
    inst = scheduling.parse_instance(gen_tiny_scheduling(rng))
    mismatch = 0
    for start in oracles.enumerate_schedules(inst):
        expected = oracles.schedule_feasible(inst, start)
        got = scheduling.verify(inst, scheduling.Schedule(start=dict(start))) == []
        if expected != got:
            mismatch += 1
        if expected and got:
            assert scheduling.evaluate(inst, scheduling.Schedule(start=dict(start))) == float(
                oracles.schedule_latency(inst, start)
            )
    assert mismatch == 0
