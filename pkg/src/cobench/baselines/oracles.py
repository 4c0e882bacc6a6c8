"""Brute-force oracles for tiny instances.

These enumerate complete solution spaces with logic written independently
of the production verifiers and evaluators, so tests can compare the two
routes.  They are exponential and only meant for the instance sizes the
test suite generates.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..problems.crew import CrewInstance
from ..problems.egraph import EGraph
from ..problems.iop import IopGraph
from ..problems.mendelian import Pedigree, as_pair
from ..problems.pdptw import PdptwInstance
from ..problems.protein import GcInstance
from ..problems.scheduling import SchedInstance

# --- operator scheduling ---------------------------------------------------


def schedule_space(inst: SchedInstance) -> int:
    horizon = sum(inst.delay[t] for t in inst.nodes.values())
    return (horizon + 1) ** len(inst.nodes)


def enumerate_schedules(inst: SchedInstance):
    """All start-time maps with every node in [0, sum-of-delays]."""
    names = sorted(inst.nodes)
    horizon = sum(inst.delay[t] for t in inst.nodes.values())
    for combo in itertools.product(range(horizon + 1), repeat=len(names)):
        yield dict(zip(names, combo))


def schedule_feasible(inst: SchedInstance, start: dict[str, int]) -> bool:
    for src, dst, _ in inst.edges:
        if start[src] + inst.delay[inst.nodes[src]] > start[dst]:
            return False
    busy: dict[tuple[str, int], int] = {}
    for node, t in start.items():
        rtype = inst.nodes[node]
        for c in range(t, t + inst.delay[rtype]):
            key = (rtype, c)
            busy[key] = busy.get(key, 0) + 1
            if busy[key] > inst.resource[rtype]:
                return False
    return True


def schedule_latency(inst: SchedInstance, start: dict[str, int]) -> int:
    return max(t + inst.delay[inst.nodes[n]] for n, t in start.items())


def schedule_optimum(inst: SchedInstance) -> int:
    best = None
    for start in enumerate_schedules(inst):
        if schedule_feasible(inst, start):
            latency = schedule_latency(inst, start)
            if best is None or latency < best:
                best = latency
    assert best is not None, "the serial schedule is always inside the horizon"
    return best


# --- e-graph extraction ----------------------------------------------------


def extraction_space(g: EGraph) -> int:
    space = 1
    for members in g.classes.values():
        space *= len(members) + 1
    return space


def enumerate_selections(g: EGraph):
    """All partial class -> node maps (a class may also stay unselected)."""
    cids = sorted(g.classes)
    options = [[None] + sorted(g.classes[c]) for c in cids]
    for combo in itertools.product(*options):
        yield {c: n for c, n in zip(cids, combo) if n is not None}


def selection_feasible(g: EGraph, chosen: dict[str, str]) -> bool:
    if not all(r in chosen for r in g.roots):
        return False
    for nid in chosen.values():
        if not all(child in chosen for child in g.nodes[nid].children):
            return False
    # Kahn's algorithm over the induced class graph: a class resolves once
    # every child of its chosen node has resolved.
    remaining = {c: len(g.nodes[n].children) for c, n in chosen.items()}
    parents: dict[str, list[str]] = {c: [] for c in chosen}
    for cid, nid in chosen.items():
        for child in g.nodes[nid].children:
            parents[child].append(cid)
    queue = [c for c, k in remaining.items() if k == 0]
    seen = 0
    while queue:
        c = queue.pop()
        seen += 1
        for parent in parents[c]:
            remaining[parent] -= 1
            if remaining[parent] == 0:
                queue.append(parent)
    return seen == len(chosen)


def selection_cost(g: EGraph, chosen: dict[str, str]) -> float:
    return float(sum(g.nodes[n].cost for n in chosen.values()))


def extraction_optimum(g: EGraph) -> float | None:
    best = None
    for chosen in enumerate_selections(g):
        if selection_feasible(g, chosen):
            cost = selection_cost(g, chosen)
            if best is None or cost < best:
                best = cost
    return best


# --- intra-operator parallelism ---------------------------------------------


def enumerate_assignments(g: IopGraph):
    for combo in itertools.product(*(range(len(n.costs)) for n in g.nodes)):
        yield dict(enumerate(combo))


def assignment_feasible(g: IopGraph, strategy: dict[int, int]) -> bool:
    times = [t for n in g.nodes for t in (n.lo, n.hi)]
    if not times:
        return True
    for t in range(min(times), max(times)):
        used = sum(
            n.usages[strategy[i]] for i, n in enumerate(g.nodes) if n.lo <= t < n.hi
        )
        if used > g.budget:
            return False
    return True


def assignment_cost(g: IopGraph, strategy: dict[int, int]) -> float:
    total = sum(n.costs[strategy[i]] for i, n in enumerate(g.nodes))
    for e in g.edges:
        total += e.matrix[strategy[e.u]][strategy[e.v]]
    return float(total)


def iop_optimum(g: IopGraph) -> float | None:
    best = None
    for strategy in enumerate_assignments(g):
        if assignment_feasible(g, strategy):
            cost = assignment_cost(g, strategy)
            if best is None or cost < best:
                best = cost
    return best


# --- protein sequence design -------------------------------------------------


def protein_optimum(inst: GcInstance) -> tuple[float, str]:
    """Exhaustive maximum of the fitness over all 2^n sequences."""
    n = inst.n
    masks = np.arange(1 << n, dtype=np.int64)
    phi = np.zeros(1 << n, dtype=np.float64)
    for i, j, w in inst.contacts:
        phi += w * (((masks >> i) & 1) * ((masks >> j) & 1)).astype(np.float64)
    for i, a in enumerate(inst.exposure):
        phi -= inst.beta * a * ((masks >> i) & 1).astype(np.float64)
    best = int(np.argmax(phi))
    seq = "".join("H" if (best >> i) & 1 else "P" for i in range(n))
    return float(phi[best]), seq


def protein_fitness(inst: GcInstance, seq: str) -> float:
    h = [1 if ch == "H" else 0 for ch in seq]
    total = 0.0
    for i, j, w in inst.contacts:
        total += w * h[i] * h[j]
    for i, a in enumerate(inst.exposure):
        total -= inst.beta * a * h[i]
    return total


# --- Mendelian error detection -----------------------------------------------


def all_pairs(alleles: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(1, alleles + 1) for b in range(a, alleles + 1)]


def enumerate_pedigree_assignments(ped: Pedigree):
    ids = [ind.id for ind in ped.individuals]
    pairs = all_pairs(ped.alleles)
    for combo in itertools.product(pairs, repeat=len(ids)):
        yield dict(zip(ids, combo))


def pedigree_feasible(ped: Pedigree, pairs: dict[int, tuple[int, int]]) -> bool:
    for ind in ped.individuals:
        if ind.father == 0 and ind.mother == 0:
            continue
        a, b = pairs[ind.id]
        ok = False
        for p, q in ((a, b), (b, a)):
            if ind.father != 0 and p not in pairs[ind.father]:
                continue
            if ind.mother != 0 and q not in pairs[ind.mother]:
                continue
            ok = True
            break
        if not ok:
            return False
    return True


def pedigree_corrections(ped: Pedigree, pairs: dict[int, tuple[int, int]]) -> int:
    return sum(
        1
        for ind in ped.individuals
        if ind.genotype is not None and as_pair(*pairs[ind.id]) != ind.genotype
    )


def mendelian_optimum(ped: Pedigree) -> int:
    best = None
    for pairs in enumerate_pedigree_assignments(ped):
        if pedigree_feasible(ped, pairs):
            cost = pedigree_corrections(ped, pairs)
            if best is None or cost < best:
                best = cost
    assert best is not None, "assigning (1,1) everywhere is always consistent"
    return best


# --- PDPTW -------------------------------------------------------------------


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]
        yield [[first]] + partition


def enumerate_route_plans(inst: PdptwInstance):
    """Every way to split requests over vehicles and order each route."""
    pickups = sorted(p.id for p in inst.pickups())
    for partition in _set_partitions(pickups):
        per_block = []
        for block in partition:
            stops = []
            for p in block:
                stops.append(p)
                stops.append(inst.locations[p].delivery_partner)
            per_block.append([perm for perm in itertools.permutations(stops)])
        for combo in itertools.product(*per_block):
            yield tuple(tuple(route) for route in combo)


def plan_feasible(inst: PdptwInstance, plan: tuple[tuple[int, ...], ...]) -> bool:
    visited = [lid for route in plan for lid in route]
    if sorted(visited) != sorted(inst.locations):
        return False
    for route in plan:
        pos = {lid: k for k, lid in enumerate(route)}
        load = 0.0
        for lid in route:
            loc = inst.locations[lid]
            if loc.demand > 0 and pos.get(loc.delivery_partner, -1) < pos[lid]:
                return False
            load += loc.demand
            if load < 0 or load > inst.capacity:
                return False
        t = inst.depot.earliest
        prev = inst.depot
        for lid in route:
            loc = inst.locations[lid]
            dx = prev.x - loc.x
            dy = prev.y - loc.y
            t = t + prev.service + (dx * dx + dy * dy) ** 0.5
            if t < loc.earliest:
                t = loc.earliest
            if t > loc.latest:
                return False
            prev = loc
        dx = prev.x - inst.depot.x
        dy = prev.y - inst.depot.y
        if t + prev.service + (dx * dx + dy * dy) ** 0.5 > inst.depot.latest:
            return False
    return True


def plan_cost(inst: PdptwInstance, plan: tuple[tuple[int, ...], ...]) -> float:
    total = 0.0
    for route in plan:
        if not route:
            continue
        prev = inst.depot
        for lid in route:
            loc = inst.locations[lid]
            dx = prev.x - loc.x
            dy = prev.y - loc.y
            total += (dx * dx + dy * dy) ** 0.5
            prev = loc
        dx = prev.x - inst.depot.x
        dy = prev.y - inst.depot.y
        total += (dx * dx + dy * dy) ** 0.5
    return total


def pdptw_optimum(inst: PdptwInstance) -> float | None:
    best = None
    for plan in enumerate_route_plans(inst):
        if plan_feasible(inst, plan):
            cost = plan_cost(inst, plan)
            if best is None or cost < best:
                best = cost
    return best


# --- crew pairing (sanity helper, not part of the acceptance oracle set) ----


def pairing_cost(inst: CrewInstance, pairings: list[tuple[str, ...]]) -> float:
    total = 0.0
    for legs in pairings:
        span = inst.flights[legs[-1]].arr_min - inst.flights[legs[0]].dep_min
        total += inst.fixed_cost + inst.per_minute * span
    return total
