from __future__ import annotations

import json
import random

from cobench import datagen
from cobench.baselines import build_reference_costs, load_reference_costs, solve_reference
from cobench.baselines.bio import baseline_protein
from cobench.baselines.compilers import baseline_extract
from cobench.baselines.eda import baseline_map, baseline_schedule
from cobench.problems import egraph, mapping, protein, scheduling
from cobench.problems import get_adapter
from cobench.types import ProblemId

from conftest import SCHED_EXAMPLE


def test_list_scheduler_on_worked_example_latency_4():
    inst = scheduling.parse_instance(SCHED_EXAMPLE)
    start = baseline_schedule(inst)
    sched = scheduling.Schedule(start=start)
    assert scheduling.verify(inst, sched) == []
    assert scheduling.evaluate(inst, sched) == 4.0


def test_list_scheduler_serial_chain_with_ample_resources():
    k = 6
    doc = {
        "name": "chain",
        "delay": {"op": 1},
        "resource": {"op": 8},
        "nodes": [[f"n{i}", "op"] for i in range(k)],
        "edges": [[f"n{i}", f"n{i+1}", "e"] for i in range(k - 1)],
    }
    inst = scheduling.parse_instance(json.dumps(doc).encode())
    sched = scheduling.Schedule(start=baseline_schedule(inst))
    assert scheduling.evaluate(inst, sched) == float(k)


def test_single_small_network_maps_to_one_lut():
    net = mapping.parse_network(
        ".model one\n.inputs a b c\n.outputs y\n.names a b c y\n111 1\n.end\n"
    )
    out = baseline_map(net)
    assert mapping.verify(net, out) == []
    assert mapping.evaluate(out) == 1.0


def test_two_level_and_tree_collapses():
    text = (
        ".model tree\n.inputs a b c d e f g h\n.outputs y\n"
        ".names a b t0\n11 1\n.names c d t1\n11 1\n"
        ".names e f t2\n11 1\n.names g h t3\n11 1\n"
        ".names t0 t1 u0\n11 1\n.names t2 t3 u1\n11 1\n"
        ".names u0 u1 y\n11 1\n.end\n"
    )
    net = mapping.parse_network(text)
    out = baseline_map(net)
    assert mapping.verify(net, out) == []
    assert mapping.evaluate(out) <= 2.0  # 8-input AND fits in two 6-LUTs


def test_mapper_beats_identity_on_multilevel_network():
    rng = random.Random(123)
    net = mapping.parse_network(datagen.gen_mapping(rng, 15).decode())
    out = baseline_map(net)
    assert mapping.verify(net, out) == []
    assert mapping.evaluate(out) < len(net.nodes)


def test_extractor_feasible_and_no_better_than_oracle():
    from cobench.baselines import oracles

    rng = random.Random(77)
    for _ in range(20):
        g = egraph.parse_instance(datagen.gen_tiny_egraph(rng))
        chosen = baseline_extract(g)
        sel = egraph.ExtractionSelection(chosen=chosen)
        assert egraph.verify(g, sel) == []
        assert egraph.evaluate(g, sel) >= oracles.extraction_optimum(g)


def test_extractor_single_node_and_shared_leaf():
    g = egraph.parse_instance(
        json.dumps(
            {
                "classes": {"c": ["n"]},
                "nodes": {"n": {"cost": 3, "children": []}},
                "roots": ["c"],
            }
        ).encode()
    )
    assert baseline_extract(g) == {"c": "n"}

    diamond = egraph.parse_instance(
        json.dumps(
            {
                "classes": {"r": ["nr"], "a": ["na"], "b": ["nb"], "leaf": ["nl"]},
                "nodes": {
                    "nr": {"cost": 0, "children": ["a", "b"]},
                    "na": {"cost": 1, "children": ["leaf"]},
                    "nb": {"cost": 1, "children": ["leaf"]},
                    "nl": {"cost": 5, "children": []},
                },
                "roots": ["r"],
            }
        ).encode()
    )
    chosen = baseline_extract(diamond)
    sel = egraph.ExtractionSelection(chosen=chosen)
    assert egraph.evaluate(diamond, sel) == 7.0  # leaf cost counted once


def test_protein_designer_special_cases():
    zero = protein.parse_instance(
        json.dumps({"n": 5, "contacts": [], "exposure": [1, 1, 1, 1, 1], "beta": 2}).encode()
    )
    assert baseline_protein(zero) == "PPPPP"

    pair = protein.parse_instance(
        json.dumps({"n": 4, "contacts": [[1, 2, 3]], "exposure": [0, 0, 0, 0], "beta": 0}).encode()
    )
    seq = baseline_protein(pair)
    assert seq[1] == "H" and seq[2] == "H"


def test_insertion_solver_on_line_request():
    from cobench.baselines.logistics import baseline_pdptw
    from cobench.problems import pdptw

    inst = pdptw.parse_instance(
        b"1 10\n0 0 0 0 0 1000 0 0 0\n1 1 0 2 0 1000 0 0 2\n2 2 0 -2 0 1000 0 1 0\n"
    )
    routes = baseline_pdptw(inst)
    plan = pdptw.RoutePlan(routes=tuple(routes))
    assert pdptw.verify(inst, plan) == []
    assert pdptw.evaluate(inst, plan) == 4.0


def test_greedy_pairing_on_out_and_back():
    from cobench.baselines.logistics import baseline_pairings
    from cobench.problems import crew

    inst = crew.parse_instance(
        json.dumps(
            {
                "flights": [
                    {"id": "f1", "dep": "AAA", "arr": "BBB", "dep_min": 480, "arr_min": 560},
                    {"id": "f2", "dep": "BBB", "arr": "AAA", "dep_min": 600, "arr_min": 690},
                ],
                "bases": ["AAA"],
                "rules": {"min_connect": 30, "max_span": 720, "max_legs": 4},
                "costs": {"fixed": 100, "per_minute": 1},
            }
        ).encode()
    )
    pairings = baseline_pairings(inst)
    assert pairings == [("f1", "f2")]
    ps = crew.PairingSet(pairings=tuple(pairings))
    assert crew.verify(inst, ps) == []
    assert crew.evaluate(inst, ps) == 100.0 + 210.0


def test_two_node_iop_matches_enumeration_optimum():
    from cobench.baselines.compilers import baseline_iop
    from cobench.baselines import oracles
    from cobench.problems import iop

    g = iop.parse_instance(
        json.dumps(
            {
                "budget": 6,
                "nodes": [
                    {"interval": [0, 4], "strategies": [{"cost": 1, "usage": 5}, {"cost": 4, "usage": 2}]},
                    {"interval": [2, 6], "strategies": [{"cost": 2, "usage": 4}, {"cost": 3, "usage": 1}]},
                ],
                "edges": [{"u": 0, "v": 1, "matrix": [[0, 1], [1, 0]]}],
            }
        ).encode()
    )
    assignment = iop.StrategyAssignment(strategy=baseline_iop(g))
    assert iop.verify(g, assignment) == []
    assert iop.evaluate(g, assignment) >= oracles.iop_optimum(g)


def test_reference_solutions_round_trip(suite):
    for problem in (ProblemId.OPERATOR_SCHEDULING, ProblemId.PDPTW, ProblemId.CREW_PAIRING):
        ref = suite.demo_instances(problem)[0]
        sol = solve_reference(ref)
        adapter = get_adapter(problem)
        inst = adapter.parse_instance(ref.payload)
        parsed = adapter.parse_solution(inst, sol.payload)
        assert adapter.verify(inst, parsed) == []
        assert adapter.evaluate(inst, parsed) == sol.cost


def test_reference_build_is_idempotent(tmp_path, suite):
    instances = suite.demo_instances(ProblemId.EGRAPH_EXTRACTION)
    build_reference_costs(instances, tmp_path / "one")
    build_reference_costs(instances, tmp_path / "two")
    a = (tmp_path / "one" / "egraph_extraction" / "costs.csv").read_bytes()
    b = (tmp_path / "two" / "egraph_extraction" / "costs.csv").read_bytes()
    assert a == b


def test_bundled_references_cover_all_eval_instances(suite):
    for problem in ProblemId:
        costs = load_reference_costs(suite.references_dir(), problem)
        for ref in suite.eval_instances(problem):
            assert ref.instance_id in costs


def test_bundled_references_revalidate(suite):
    for problem in ProblemId:
        adapter = get_adapter(problem)
        costs = load_reference_costs(suite.references_dir(), problem)
        sol_dir = suite.references_dir() / problem.value / "solutions"
        for ref in suite.demo_instances(problem) + suite.eval_instances(problem):
            payload = (sol_dir / f"{ref.instance_id}{adapter.solution_suffix}").read_text()
            inst = adapter.parse_instance(ref.payload)
            parsed = adapter.parse_solution(inst, payload)
            assert adapter.verify(inst, parsed) == []
            assert adapter.evaluate(inst, parsed) == costs[ref.instance_id]


def test_rebuilt_references_match_bundled_byte_for_byte(tmp_path, suite):
    build_reference_costs(suite.all_instances(), tmp_path)
    bundled = suite.references_dir()
    fresh_files = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*") if p.is_file())
    bundled_files = sorted(p.relative_to(bundled) for p in bundled.rglob("*") if p.is_file())
    assert fresh_files == bundled_files
    for rel in fresh_files:
        assert (tmp_path / rel).read_bytes() == (bundled / rel).read_bytes(), rel
