"""Reference solvers for the compiler problems."""

from __future__ import annotations

from ..problems.egraph import EGraph
from ..problems.iop import IopGraph, peak_profile
from . import SolverFailure

# --- e-graph extraction: bottom-up fixed point + top-down selection ----------


def baseline_extract(g: EGraph) -> dict[str, str]:
    """Working-list cost propagation; picks each class's cheapest completed node."""
    INF = float("inf")
    class_cost: dict[str, float] = {c: INF for c in g.classes}
    class_pick: dict[str, str | None] = {c: None for c in g.classes}

    changed = True
    while changed:
        changed = False
        for cid in sorted(g.classes):
            for nid in sorted(g.classes[cid]):
                node = g.nodes[nid]
                total = node.cost
                complete = True
                for child in node.children:
                    if class_cost[child] == INF:
                        complete = False
                        break
                    total += class_cost[child]
                if complete and total < class_cost[cid]:
                    class_cost[cid] = total
                    class_pick[cid] = nid
                    changed = True

    for r in g.roots:
        if class_pick[r] is None:
            raise SolverFailure(f"root class {r!r} has no finite-cost completion")

    chosen: dict[str, str] = {}
    stack = sorted(g.roots)
    while stack:
        cid = stack.pop()
        if cid in chosen:
            continue
        nid = class_pick[cid]
        if nid is None:
            raise SolverFailure(f"class {cid!r} required but has no completion")
        chosen[cid] = nid
        stack.extend(g.nodes[nid].children)
    return chosen


# --- intra-operator parallelism: cheapest strategy + greedy memory repair ----


def baseline_iop(g: IopGraph) -> dict[int, int]:
    strategy = {i: _cheapest_strategy(node.costs) for i, node in enumerate(g.nodes)}
    for _ in range(16 * max(1, len(g.nodes)) * _max_strategies(g)):
        overload = _first_overload(g, strategy)
        if overload is None:
            return strategy
        t, _used = overload
        move = _best_repair_move(g, strategy, t)
        if move is None:
            raise SolverFailure(f"cannot repair memory overload at time {t}")
        node, strat = move
        strategy[node] = strat
    raise SolverFailure("memory repair did not converge")


def _cheapest_strategy(costs: tuple[float, ...]) -> int:
    best = 0
    for i, c in enumerate(costs):
        if c < costs[best]:
            best = i
    return best


def _max_strategies(g: IopGraph) -> int:
    return max((len(n.costs) for n in g.nodes), default=1)


def _first_overload(g: IopGraph, strategy: dict[int, int]):
    for t, used in peak_profile(g, strategy):
        if used > g.budget:
            return t, used
    return None


def _best_repair_move(g: IopGraph, strategy: dict[int, int], t: int):
    """Cheapest strict usage reduction among the nodes alive at time t."""
    best = None
    best_key = None
    for i in sorted(strategy):
        node = g.nodes[i]
        if not node.lo <= t < node.hi:
            continue
        current = strategy[i]
        for s in range(len(node.costs)):
            if node.usages[s] >= node.usages[current]:
                continue
            key = (node.costs[s] - node.costs[current], -(node.usages[current] - node.usages[s]), i, s)
            if best_key is None or key < best_key:
                best_key = key
                best = (i, s)
    return best
