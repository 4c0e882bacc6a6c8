from __future__ import annotations

import json
import random

from cobench.baselines import oracles
from cobench.datagen import gen_tiny_egraph
from cobench.problems import egraph


def _graph(doc: dict) -> egraph.EGraph:
    return egraph.parse_instance(json.dumps(doc).encode())


CHAIN = {
    "classes": {"root": ["r0"], "mid": ["m0", "m1"], "leaf": ["l0"]},
    "nodes": {
        "r0": {"cost": 1, "children": ["mid"]},
        "m0": {"cost": 1, "children": ["leaf"]},
        "m1": {"cost": 3, "children": []},
        "l0": {"cost": 0, "children": []},
    },
    "roots": ["root"],
}


def test_chain_with_cheapest_nodes_is_feasible():
    g = _graph(CHAIN)
    sel = egraph.parse_solution(g, "root r0\nmid m0\nleaf l0\n")
    assert egraph.verify(g, sel) == []
    assert egraph.evaluate(g, sel) == 2.0


def test_self_cycle_selection_rejected():
    g = _graph(
        {
            "classes": {"a": ["n0", "n1"]},
            "nodes": {"n0": {"cost": 1, "children": ["a"]}, "n1": {"cost": 5, "children": []}},
            "roots": ["a"],
        }
    )
    sel = egraph.parse_solution(g, "a n0\n")
    assert any("cyclic" in v for v in egraph.verify(g, sel))
    assert egraph.verify(g, egraph.parse_solution(g, "a n1\n")) == []


def test_unselected_grandchild_is_closure_violation():
    g = _graph(CHAIN)
    sel = egraph.parse_solution(g, "root r0\nmid m0\n")
    assert any("not selected" in v for v in egraph.verify(g, sel))


def test_diamond_shares_leaf_cost_once():
    g = _graph(
        {
            "classes": {"root": ["r"], "a": ["na"], "b": ["nb"], "leaf": ["nl"]},
            "nodes": {
                "r": {"cost": 0, "children": ["a", "b"]},
                "na": {"cost": 1, "children": ["leaf"]},
                "nb": {"cost": 2, "children": ["leaf"]},
                "nl": {"cost": 5, "children": []},
            },
            "roots": ["root"],
        }
    )
    sel = egraph.parse_solution(g, "root r\na na\nb nb\nleaf nl\n")
    assert egraph.verify(g, sel) == []
    assert egraph.evaluate(g, sel) == 0 + 1 + 2 + 5


def test_single_zero_cost_node_costs_zero():
    g = _graph(
        {"classes": {"c": ["n"]}, "nodes": {"n": {"cost": 0, "children": []}}, "roots": ["c"]}
    )
    sel = egraph.parse_solution(g, "c n\n")
    assert egraph.verify(g, sel) == []
    assert egraph.evaluate(g, sel) == 0.0


def test_node_outside_class_is_violation():
    g = _graph(CHAIN)
    sel = egraph.parse_solution(g, "root m0\nmid m0\nleaf l0\n")
    assert any("does not belong" in v for v in egraph.verify(g, sel))


def test_verifier_and_evaluator_match_bruteforce():
    rng = random.Random(11)
    g = egraph.parse_instance(gen_tiny_egraph(rng))
    for chosen in oracles.enumerate_selections(g):
        if not chosen:
            continue
        sel = egraph.ExtractionSelection(chosen=dict(chosen))
        expected = oracles.selection_feasible(g, chosen)
        got = egraph.verify(g, sel) == []
        assert expected == got
        if expected:
            assert egraph.evaluate(g, sel) == oracles.selection_cost(g, chosen)
