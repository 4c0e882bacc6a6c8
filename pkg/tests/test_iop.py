from __future__ import annotations

import json
import random

from cobench.baselines import oracles
from cobench.datagen import gen_tiny_iop
from cobench.problems import iop


def _graph(doc: dict) -> iop.IopGraph:
    return iop.parse_instance(json.dumps(doc).encode())


def test_disjoint_intervals_each_using_full_budget():
    g = _graph(
        {
            "budget": 10,
            "nodes": [
                {"interval": [0, 2], "strategies": [{"cost": 1, "usage": 10}]},
                {"interval": [2, 4], "strategies": [{"cost": 2, "usage": 10}]},
            ],
            "edges": [],
        }
    )
    a = iop.parse_solution(g, "0 0\n1 0\n")
    assert iop.verify(g, a) == []
    assert iop.evaluate(g, a) == 3.0


def test_overlapping_full_budget_nodes_violate():
    g = _graph(
        {
            "budget": 10,
            "nodes": [
                {"interval": [0, 3], "strategies": [{"cost": 1, "usage": 10}]},
                {"interval": [2, 4], "strategies": [{"cost": 2, "usage": 10}]},
            ],
            "edges": [],
        }
    )
    a = iop.parse_solution(g, "0 0\n1 0\n")
    assert any("time 2" in v for v in iop.verify(g, a))


def test_edge_cost_matches_hand_enumeration():
    g = _graph(
        {
            "budget": 100,
            "nodes": [
                {"interval": [0, 1], "strategies": [{"cost": 1, "usage": 1}, {"cost": 2, "usage": 1}]},
                {"interval": [0, 1], "strategies": [{"cost": 5, "usage": 1}, {"cost": 3, "usage": 1}]},
            ],
            "edges": [{"u": 0, "v": 1, "matrix": [[10, 0], [0, 10]]}],
        }
    )
    # all four cases by hand: (0,0)=16, (0,1)=4, (1,0)=7, (1,1)=15
    expected = {(0, 0): 16.0, (0, 1): 4.0, (1, 0): 7.0, (1, 1): 15.0}
    for (s0, s1), cost in expected.items():
        a = iop.parse_solution(g, f"0 {s0}\n1 {s1}\n")
        assert iop.evaluate(g, a) == cost


def test_no_edges_sums_node_costs_only():
    g = _graph(
        {
            "budget": 5,
            "nodes": [
                {"interval": [0, 1], "strategies": [{"cost": 4, "usage": 1}]},
                {"interval": [0, 1], "strategies": [{"cost": 7, "usage": 1}]},
            ],
            "edges": [],
        }
    )
    a = iop.parse_solution(g, "0 0\n1 0\n")
    assert iop.evaluate(g, a) == 11.0


def test_missing_or_out_of_range_assignments_flagged():
    g = _graph(
        {
            "budget": 5,
            "nodes": [{"interval": [0, 1], "strategies": [{"cost": 1, "usage": 1}]}],
            "edges": [],
        }
    )
    assert any("no assigned strategy" in v for v in iop.verify(g, iop.StrategyAssignment({})))
    a = iop.parse_solution(g, "0 3\n")
    assert any("out of range" in v for v in iop.verify(g, a))


def test_event_sweep_equals_naive_summation_and_bruteforce():
    for seed in range(25):
        rng = random.Random(seed)
        g = iop.parse_instance(gen_tiny_iop(rng))
        for strategy in oracles.enumerate_assignments(g):
            a = iop.StrategyAssignment(strategy=dict(strategy))
            expected = oracles.assignment_feasible(g, strategy)
            assert (iop.verify(g, a) == []) == expected
            if expected:
                assert iop.evaluate(g, a) == oracles.assignment_cost(g, strategy)
