from __future__ import annotations

import json

from cobench.problems import crew


def _inst(**over) -> crew.CrewInstance:
    doc = {
        "flights": [
            {"id": "f1", "dep": "AAA", "arr": "BBB", "dep_min": 480, "arr_min": 560},
            {"id": "f2", "dep": "BBB", "arr": "AAA", "dep_min": 600, "arr_min": 690},
        ],
        "bases": ["AAA"],
        "rules": {"min_connect": 30, "max_span": 720, "max_legs": 4},
        "costs": {"fixed": 100, "per_minute": 1},
    }
    doc.update(over)
    return crew.parse_instance(json.dumps(doc).encode())


def test_out_and_back_pairing_cost():
    inst = _inst()
    ps = crew.parse_solution(inst, "f1 f2\n")
    assert crew.verify(inst, ps) == []
    # span 690-480 = 210, cost = fixed 100 + 1 * 210
    assert crew.evaluate(inst, ps) == 310.0


def test_double_coverage_is_violation():
    inst = _inst()
    ps = crew.parse_solution(inst, "f1 f2\nf1\n")
    assert any("covered 2 times" in v for v in crew.verify(inst, ps))


def test_short_connection_is_violation():
    inst = _inst(
        flights=[
            {"id": "f1", "dep": "AAA", "arr": "BBB", "dep_min": 480, "arr_min": 560},
            {"id": "f2", "dep": "BBB", "arr": "AAA", "dep_min": 570, "arr_min": 660},
        ]
    )
    ps = crew.parse_solution(inst, "f1 f2\n")
    assert any("shorter than" in v for v in crew.verify(inst, ps))


def test_non_base_endpoints_flagged():
    inst = _inst(bases=["ZZZ"])
    ps = crew.parse_solution(inst, "f1 f2\n")
    violations = crew.verify(inst, ps)
    assert any("starts at non-base" in v for v in violations)
    assert any("ends at non-base" in v for v in violations)


def test_span_and_leg_limits_enforced():
    inst = _inst(rules={"min_connect": 30, "max_span": 120, "max_legs": 1})
    ps = crew.parse_solution(inst, "f1 f2\n")
    violations = crew.verify(inst, ps)
    assert any("spans" in v for v in violations)
    assert any("legs" in v for v in violations)


def test_airport_mismatch_flagged():
    inst = _inst(
        flights=[
            {"id": "f1", "dep": "AAA", "arr": "BBB", "dep_min": 480, "arr_min": 560},
            {"id": "f2", "dep": "CCC", "arr": "AAA", "dep_min": 600, "arr_min": 690},
        ]
    )
    ps = crew.parse_solution(inst, "f1 f2\n")
    assert any("departs from" in v for v in crew.verify(inst, ps))


def test_unknown_flight_and_missing_coverage():
    inst = _inst()
    ps = crew.parse_solution(inst, "f1 ghost\n")
    violations = crew.verify(inst, ps)
    assert any("unknown flight" in v for v in violations)
    assert any("not covered" in v for v in violations)
