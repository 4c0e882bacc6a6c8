from __future__ import annotations

import json
import random

from cobench.baselines import oracles
from cobench.datagen import gen_tiny_mendelian
from cobench.problems import mendelian


def _ped(doc: dict) -> mendelian.Pedigree:
    return mendelian.parse_instance(json.dumps(doc).encode())


TRIO = {
    "alleles": 2,
    "individuals": [
        {"id": 1, "father": 0, "mother": 0, "genotype": [1, 1]},
        {"id": 2, "father": 0, "mother": 0, "genotype": [1, 1]},
        {"id": 3, "father": 1, "mother": 2, "genotype": [1, 2]},
    ],
}


def test_observed_child_corrected_to_consistent_pair():
    ped = _ped(TRIO)
    assign = mendelian.parse_solution(ped, "1 1 1\n2 1 1\n3 1 1\n")
    assert mendelian.verify(ped, assign) == []
    assert mendelian.evaluate(ped, assign) == 1.0  # only the child differs


def test_keeping_inconsistent_observation_violates():
    ped = _ped(TRIO)
    assign = mendelian.parse_solution(ped, "1 1 1\n2 1 1\n3 1 2\n")
    assert any("cannot be inherited" in v for v in mendelian.verify(ped, assign))


def test_consistent_observations_cost_zero():
    doc = {
        "alleles": 2,
        "individuals": [
            {"id": 1, "father": 0, "mother": 0, "genotype": [1, 2]},
            {"id": 2, "father": 0, "mother": 0, "genotype": [2, 2]},
            {"id": 3, "father": 1, "mother": 2, "genotype": [1, 2]},
        ],
    }
    ped = _ped(doc)
    assign = mendelian.parse_solution(ped, "1 1 2\n2 2 2\n3 1 2\n")
    assert mendelian.verify(ped, assign) == []
    assert mendelian.evaluate(ped, assign) == 0.0


def test_allele_out_of_range_flagged():
    ped = _ped(TRIO)
    assign = mendelian.parse_solution(ped, "1 1 3\n2 1 1\n3 1 1\n")
    assert any("out of range" in v for v in mendelian.verify(ped, assign))


def test_pair_order_does_not_matter():
    doc = dict(TRIO, individuals=[dict(i) for i in TRIO["individuals"]])
    doc["individuals"][0]["genotype"] = [1, 2]
    doc["individuals"][1]["genotype"] = [1, 2]
    ped = _ped(doc)
    a = mendelian.parse_solution(ped, "1 1 2\n2 1 2\n3 1 2\n")
    b = mendelian.parse_solution(ped, "1 2 1\n2 2 1\n3 2 1\n")
    assert a.pairs == b.pairs
    assert mendelian.evaluate(ped, a) == mendelian.evaluate(ped, b) == 0.0


def test_verifier_matches_bruteforce_inheritance():
    for seed in range(15):
        rng = random.Random(seed)
        ped = mendelian.parse_instance(gen_tiny_mendelian(rng))
        for pairs in oracles.enumerate_pedigree_assignments(ped):
            assign = mendelian.GenotypeAssignment(pairs=dict(pairs))
            expected = oracles.pedigree_feasible(ped, pairs)
            assert (mendelian.verify(ped, assign) == []) == expected
            if expected:
                assert mendelian.evaluate(ped, assign) == float(
                    oracles.pedigree_corrections(ped, pairs)
                )
