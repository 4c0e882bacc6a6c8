"""Deterministic instance generators.

Two layers: `gen_*` functions produce one instance payload from a seeded
RNG (tests use the tiny variants directly), and `build_suite` writes the
bundled demo/eval tree.  Numeric parameters are kept integral so evaluator
arithmetic is exact and brute-force comparisons can be bit-exact.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .types import ProblemId

SUITE_SPEC = {
    ProblemId.OPERATOR_SCHEDULING: (".json", 5, 6),
    ProblemId.TECHNOLOGY_MAPPING: (".blif", 5, 6),
    ProblemId.GLOBAL_ROUTING: (".txt", 5, 6),
    ProblemId.EGRAPH_EXTRACTION: (".json", 5, 6),
    ProblemId.INTRA_OP_PARALLELISM: (".json", 5, 6),
    ProblemId.PROTEIN_DESIGN: (".json", 5, 6),
    ProblemId.MENDELIAN_ERROR: (".json", 5, 6),
    ProblemId.CREW_PAIRING: (".json", 5, 6),
    ProblemId.PDPTW: (".txt", 5, 6),
}


# --- operator scheduling -------------------------------------------------------


def gen_scheduling(rng: random.Random, n_nodes: int, max_delay: int = 3) -> bytes:
    types = [("mul", rng.randint(2, max_delay), rng.randint(1, 2)),
             ("add", 1, rng.randint(1, 2)),
             ("sub", rng.randint(1, 2), 1)]
    used = types[: rng.randint(2, 3)]
    delay = {t: d for t, d, _ in used}
    resource = {t: g for t, _, g in used}
    nodes = [[f"n{i+1}", used[rng.randrange(len(used))][0]] for i in range(n_nodes)]
    edges = []
    for j in range(1, n_nodes):
        for i in range(j):
            if rng.random() < 0.35:
                edges.append([nodes[i][0], nodes[j][0], f"e{i}_{j}"])
    doc = {"name": "input", "delay": delay, "resource": resource,
           "nodes": nodes, "edges": edges}
    return (json.dumps(doc, indent=2) + "\n").encode()


def gen_tiny_scheduling(rng: random.Random, max_space: int = 20_000) -> bytes:
    """Small enough that every start-time tuple up to the delay sum enumerates."""
    while True:
        n = rng.randint(3, 6)
        payload = gen_scheduling(rng, n, max_delay=2 if n >= 5 else 3)
        doc = json.loads(payload)
        horizon = sum(doc["delay"][t] for _, t in doc["nodes"])
        if (horizon + 1) ** n <= max_space:
            return payload


# --- technology mapping ---------------------------------------------------------

_GATES = ("and", "or", "nand", "nor", "xor", "maj")


def _gate_rows(kind: str, k: int, rng: random.Random) -> tuple[tuple[str, ...], str]:
    if kind == "xor" and k == 2:
        return ("01", "10"), "1"
    if kind == "maj" and k == 3:
        return ("11-", "1-1", "-11"), "1"
    literals = "".join(rng.choice("01") for _ in range(k))
    if kind in ("and", "nand"):
        return (literals,), ("1" if kind == "and" else "0")
    # or/nor: single off-set row complementing the literal pattern
    flipped = "".join("0" if ch == "1" else "1" for ch in literals)
    return (flipped,), ("0" if kind == "or" else "1")


def gen_mapping(rng: random.Random, n_gates: int, n_inputs: int = 4,
                with_comments: bool = False) -> bytes:
    signals = [f"pi{i}" for i in range(n_inputs)]
    lines = [".model generated", ".inputs " + " ".join(signals)]
    body: list[str] = []
    gate_names: list[str] = []
    consumed: set[str] = set()
    for g in range(n_gates):
        k = rng.randint(1, min(4, len(signals)))
        ins = rng.sample(signals, k)
        name = f"g{g}"
        if k == 1:
            rows, bit = ((("1",), "1") if rng.random() < 0.5 else (("0",), "1"))
        else:
            kind = rng.choice([x for x in _GATES if not (x == "xor" and k != 2)
                               and not (x == "maj" and k != 3)])
            rows, bit = _gate_rows(kind, k, rng)
        if with_comments and g == 0:
            body.append("# first gate")
        header = f".names {' '.join(ins)} {name}"
        if with_comments and g == 1 and len(ins) >= 2:
            split = header.rindex(" ")  # continuation break on a token boundary
            body.append(header[:split] + " \\")
            body.append(header[split + 1:])
        else:
            body.append(header)
        for row in rows:
            body.append(f"{row} {bit}")
        consumed.update(ins)
        signals.append(name)
        gate_names.append(name)
    outputs = [g for g in gate_names if g not in consumed]
    if not outputs:
        outputs = [gate_names[-1]]
    lines.append(".outputs " + " ".join(outputs))
    lines.extend(body)
    lines.append(".end")
    return ("\n".join(lines) + "\n").encode()


# --- global routing --------------------------------------------------------------


def gen_routing(rng: random.Random, x: int, y: int, n_nets: int) -> bytes:
    lines = [f"grid {x} {y} 2", "layer 0 H 2", "layer 1 V 2"]
    for _ in range(rng.randint(1, 3)):
        ex = rng.randrange(x - 1)
        ey = rng.randrange(y)
        lines.append(f"capacity {ex} {ey} 0 {ex + 1} {ey} 0 {rng.randint(0, 1)}")
    for n in range(n_nets):
        lines.append(f"net net{n}")
        for _ in range(rng.randint(2, 4)):
            lines.append(f"pin {rng.randrange(x)} {rng.randrange(y)} {rng.randrange(2)}")
        lines.append("end")
    return ("\n".join(lines) + "\n").encode()


# --- e-graph extraction ------------------------------------------------------------


def gen_egraph(rng: random.Random, n_classes: int, back_edges: bool = True) -> bytes:
    classes: dict[str, list[str]] = {}
    nodes: dict[str, dict] = {}
    counter = 0
    for c in range(n_classes):
        cid = f"c{c}"
        members = []
        for m in range(rng.randint(1, 3)):
            nid = f"n{counter}"
            counter += 1
            if m == 0:
                # Guarantees a completion: children only from strictly lower classes.
                lower = [f"c{i}" for i in range(c)]
                children = rng.sample(lower, min(len(lower), rng.randint(0, 2)))
            else:
                pool = [f"c{i}" for i in range(n_classes) if i != c] if back_edges else [
                    f"c{i}" for i in range(c)
                ]
                children = rng.sample(pool, min(len(pool), rng.randint(0, 2)))
            nodes[nid] = {"cost": rng.randint(0, 9), "children": children}
            members.append(nid)
        classes[cid] = members
    n_roots = rng.randint(1, max(1, n_classes // 3))
    roots = sorted(rng.sample(list(classes), n_roots))
    doc = {"classes": classes, "nodes": nodes, "roots": roots}
    return (json.dumps(doc, indent=2) + "\n").encode()


def gen_tiny_egraph(rng: random.Random, max_nodes: int = 12, max_space: int = 20_000) -> bytes:
    while True:
        payload = gen_egraph(rng, rng.randint(2, 5))
        doc = json.loads(payload)
        if len(doc["nodes"]) > max_nodes:
            continue
        space = 1
        for members in doc["classes"].values():
            space *= len(members) + 1
        if space <= max_space:
            return payload


# --- intra-operator parallelism ------------------------------------------------------


def gen_iop(rng: random.Random, n_nodes: int, margin: int = 2) -> bytes:
    nodes = []
    for _ in range(n_nodes):
        lo = rng.randint(0, 12)
        hi = lo + rng.randint(1, 6)
        n_strats = rng.randint(1, 3)
        strategies = [
            {"cost": rng.randint(1, 20), "usage": rng.randint(1, 10)} for _ in range(n_strats)
        ]
        nodes.append({"interval": [lo, hi], "strategies": strategies})
    edges = []
    for u in range(n_nodes):
        for v in range(u + 1, n_nodes):
            if rng.random() < 0.25:
                matrix = [
                    [rng.randint(0, 8) for _ in nodes[v]["strategies"]]
                    for _ in nodes[u]["strategies"]
                ]
                edges.append({"u": u, "v": v, "matrix": matrix})
    # Budget admits the all-minimum-usage assignment, so a repair always exists.
    peak = 0
    times = {t for n in nodes for t in n["interval"]}
    for t in times:
        used = sum(
            min(s["usage"] for s in n["strategies"])
            for n in nodes
            if n["interval"][0] <= t < n["interval"][1]
        )
        peak = max(peak, used)
    doc = {"budget": peak + rng.randint(0, margin), "nodes": nodes, "edges": edges}
    return (json.dumps(doc, indent=2) + "\n").encode()


def gen_tiny_iop(rng: random.Random) -> bytes:
    return gen_iop(rng, rng.randint(2, 6), margin=3)


# --- protein sequence design ------------------------------------------------------------


def gen_protein(rng: random.Random, n: int) -> bytes:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    n_contacts = min(len(pairs), rng.randint(n, 2 * n))
    contacts = [[i, j, rng.randint(0, 8)] for i, j in sorted(rng.sample(pairs, n_contacts))]
    doc = {
        "n": n,
        "contacts": contacts,
        "exposure": [rng.randint(0, 4) for _ in range(n)],
        "beta": rng.randint(1, 2),
    }
    return (json.dumps(doc, indent=2) + "\n").encode()


def gen_tiny_protein(rng: random.Random) -> bytes:
    return gen_protein(rng, rng.randint(4, 16))


# --- Mendelian error detection -----------------------------------------------------------


def gen_mendelian(rng: random.Random, n_individuals: int, alleles: int = 2,
                  error_rate: float = 0.25) -> bytes:
    true_pairs: dict[int, tuple[int, int]] = {}
    parents: dict[int, tuple[int, int]] = {}
    individuals = []
    for i in range(1, n_individuals + 1):
        if i <= 2 or rng.random() < 0.3:
            father = mother = 0
            a = rng.randint(1, alleles)
            b = rng.randint(1, alleles)
        else:
            father, mother = rng.sample(range(1, i), 2)
            a = rng.choice(true_pairs[father])
            b = rng.choice(true_pairs[mother])
        pair = (min(a, b), max(a, b))
        true_pairs[i] = pair
        parents[i] = (father, mother)
        observed: list[int] | None = list(pair)
        if rng.random() < error_rate:
            # Prefer an observation that is impossible under the true parent
            # pairs, so some instances genuinely require corrections.
            if father != 0:
                inheritable = {
                    (min(p, q), max(p, q))
                    for p in true_pairs[father]
                    for q in true_pairs[mother]
                }
                impossible = [
                    (p, q)
                    for p in range(1, alleles + 1)
                    for q in range(p, alleles + 1)
                    if (p, q) not in inheritable
                ]
                if impossible:
                    observed = list(rng.choice(impossible))
                else:
                    observed = sorted((rng.randint(1, alleles), rng.randint(1, alleles)))
            else:
                observed = sorted((rng.randint(1, alleles), rng.randint(1, alleles)))
        if rng.random() < 0.15:
            observed = None
        individuals.append(
            {"id": i, "father": father, "mother": mother, "genotype": observed}
        )
    doc = {"alleles": alleles, "individuals": individuals}
    return (json.dumps(doc, indent=2) + "\n").encode()


def gen_tiny_mendelian(rng: random.Random) -> bytes:
    return gen_mendelian(rng, rng.randint(3, 6), alleles=2)


# --- airline crew pairing -----------------------------------------------------------------


def gen_crew(rng: random.Random, n_rotations: int, min_connect: int = 30) -> bytes:
    """Rotations out of one hub with rotation-private intermediate airports.

    Keeps the instance decomposable by the greedy nearest-legal-continuation
    construction: from any non-base airport there is exactly one onward leg.
    """
    flights = []
    fid = 0
    for r in range(n_rotations):
        legs = rng.randint(2, 3)
        airports = ["HUB"] + [f"A{r}{chr(ord('B') + k)}" for k in range(legs - 1)] + ["HUB"]
        t = rng.randint(6 * 60, 12 * 60)
        for k in range(legs):
            dep_min = t
            arr_min = dep_min + rng.randint(40, 110)
            fid += 1
            flights.append(
                {
                    "id": f"f{fid:02d}",
                    "dep": airports[k],
                    "arr": airports[k + 1],
                    "dep_min": dep_min,
                    "arr_min": arr_min,
                }
            )
            t = arr_min + min_connect + rng.randint(0, 45)
    doc = {
        "flights": flights,
        "bases": ["HUB"],
        "rules": {"min_connect": min_connect, "max_span": 900, "max_legs": 4},
        "costs": {"fixed": 100, "per_minute": 1},
    }
    return (json.dumps(doc, indent=2) + "\n").encode()


# --- PDPTW ---------------------------------------------------------------------------------


def gen_pdptw(rng: random.Random, n_requests: int, capacity: int = 30) -> bytes:
    rows = [f"{max(2, n_requests)} {capacity}"]
    depot_latest = 4000
    rows.append(f"0 40 50 0 0 {depot_latest} 0 0 0")
    for r in range(1, n_requests + 1):
        p_id, d_id = 2 * r - 1, 2 * r
        px, py = rng.randint(0, 80), rng.randint(0, 80)
        dx, dy = rng.randint(0, 80), rng.randint(0, 80)
        demand = rng.randint(1, max(1, capacity // 3))
        p_early = rng.randint(0, 300)
        p_late = p_early + rng.randint(600, 1200)
        d_early = p_early
        d_late = p_late + rng.randint(400, 900)
        service = rng.choice((0, 10))
        rows.append(f"{p_id} {px} {py} {demand} {p_early} {p_late} {service} 0 {d_id}")
        rows.append(f"{d_id} {dx} {dy} {-demand} {d_early} {d_late} {service} {p_id} 0")
    return ("\n".join(rows) + "\n").encode()


def gen_tiny_pdptw(rng: random.Random) -> bytes:
    return gen_pdptw(rng, rng.randint(1, 3), capacity=12)


# --- suite construction ---------------------------------------------------------------------


def _suite_payload(problem: ProblemId, rng: random.Random, split: str, index: int) -> bytes:
    demo = split == "demo"
    if problem is ProblemId.OPERATOR_SCHEDULING:
        return gen_scheduling(rng, rng.randint(5, 9) if demo else rng.randint(18, 30))
    if problem is ProblemId.TECHNOLOGY_MAPPING:
        return gen_mapping(
            rng,
            rng.randint(8, 16) if demo else rng.randint(30, 60),
            n_inputs=4 if demo else 6,
            with_comments=demo and index == 1,
        )
    if problem is ProblemId.GLOBAL_ROUTING:
        if demo:
            return gen_routing(rng, 5, 5, rng.randint(3, 5))
        return gen_routing(rng, 8, 8, rng.randint(6, 10))
    if problem is ProblemId.EGRAPH_EXTRACTION:
        return gen_egraph(rng, rng.randint(4, 7) if demo else rng.randint(12, 20))
    if problem is ProblemId.INTRA_OP_PARALLELISM:
        return gen_iop(rng, rng.randint(4, 6) if demo else rng.randint(10, 16))
    if problem is ProblemId.PROTEIN_DESIGN:
        return gen_protein(rng, rng.randint(10, 14) if demo else rng.randint(24, 40))
    if problem is ProblemId.MENDELIAN_ERROR:
        return gen_mendelian(
            rng,
            rng.randint(6, 9) if demo else rng.randint(12, 16),
            alleles=2 if demo or index % 2 else 3,
            error_rate=0.5 if demo else 0.3,
        )
    if problem is ProblemId.CREW_PAIRING:
        return gen_crew(rng, rng.randint(2, 3) if demo else rng.randint(4, 6))
    if problem is ProblemId.PDPTW:
        return gen_pdptw(rng, rng.randint(2, 3) if demo else rng.randint(6, 9))
    raise ValueError(f"no generator for {problem}")


def build_suite(out_dir: Path) -> None:
    """Write the bundled instance tree: instances/<problem>/{demo,eval}/<id><ext>."""
    out_dir = Path(out_dir)
    for pnum, problem in enumerate(ProblemId):
        ext, n_demo, n_eval = SUITE_SPEC[problem]
        for split, count in (("demo", n_demo), ("eval", n_eval)):
            split_dir = out_dir / problem.value / split
            split_dir.mkdir(parents=True, exist_ok=True)
            for index in range(1, count + 1):
                rng = random.Random(100_000 * pnum + (0 if split == "demo" else 1000) + index)
                payload = _suite_payload(problem, rng, split, index)
                (split_dir / f"{split}_{index:02d}{ext}").write_bytes(payload)


def main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description="regenerate the bundled instance suite")
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args()
    build_suite(args.out)


if __name__ == "__main__":
    main()
