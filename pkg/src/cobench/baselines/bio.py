"""Reference solvers for the biology problems."""

from __future__ import annotations

import itertools

from ..problems.mendelian import Pair, Pedigree, as_pair
from ..problems.protein import GcInstance
from . import SolverFailure

# --- protein design: exact optimum via project-selection min-cut -------------
#
# Selecting the hydrophobic set S earns w_ij for every contact inside S and
# pays beta*a_i per selected residue.  That is the classic project-selection
# problem: a source-side node per contact (capacity w_ij), a sink edge per
# residue (capacity beta*a_i), infinite edges from contacts to their
# endpoints.  The optimum equals total contact weight minus the min cut, and
# the source side of the cut is the optimal H set.

_EXHAUSTIVE_LIMIT = 10  # pedigree size up to which repair is replaced by enumeration


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.graph: list[list[list]] = [[] for _ in range(n)]  # [to, cap, rev_index]

    def add_edge(self, u: int, v: int, cap) -> None:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.n
        self.level[s] = 0
        queue = [s]
        for u in queue:
            for edge in self.graph[u]:
                v, cap, _ = edge
                if cap > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    queue.append(v)
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, f):
        if u == t:
            return f
        while self.it[u] < len(self.graph[u]):
            edge = self.graph[u][self.it[u]]
            v, cap, rev = edge
            if cap > 0 and self.level[v] == self.level[u] + 1:
                d = self._dfs(v, t, min(f, cap))
                if d > 0:
                    edge[1] -= d
                    self.graph[v][rev][1] += d
                    return d
            self.it[u] += 1
        return 0

    def max_flow(self, s: int, t: int):
        flow = 0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                f = self._dfs(s, t, float("inf"))
                if f <= 0:
                    break
                flow += f
        return flow

    def source_side(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, cap, _ in self.graph[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def baseline_protein(inst: GcInstance) -> str:
    """Exact fitness-optimal H/P sequence."""
    contacts = [(i, j, w) for i, j, w in inst.contacts if w > 0]
    num_nodes = 2 + inst.n + len(contacts)
    source, sink = 0, 1
    residue = lambda i: 2 + i  # noqa: E731
    contact = lambda k: 2 + inst.n + k  # noqa: E731

    total_profit = sum(w for _, _, w in contacts)
    infinite = total_profit + sum(inst.beta * a for a in inst.exposure) + 1

    net = _Dinic(num_nodes)
    for k, (i, j, w) in enumerate(contacts):
        net.add_edge(source, contact(k), w)
        net.add_edge(contact(k), residue(i), infinite)
        net.add_edge(contact(k), residue(j), infinite)
    for i, a in enumerate(inst.exposure):
        penalty = inst.beta * a
        if penalty > 0:
            net.add_edge(residue(i), sink, penalty)

    net.max_flow(source, sink)
    keep = net.source_side(source)
    return "".join("H" if residue(i) in keep else "P" for i in range(inst.n))


# --- Mendelian error detection ------------------------------------------------


def baseline_mendelian(ped: Pedigree) -> dict[int, Pair]:
    """Exhaustive minimum on small pedigrees, observation-preserving repair otherwise."""
    pairs = [(a, b) for a in range(1, ped.alleles + 1) for b in range(a, ped.alleles + 1)]
    space = len(pairs) ** len(ped.individuals)
    if len(ped.individuals) <= _EXHAUSTIVE_LIMIT and space <= 400_000:
        return _mendelian_exhaustive(ped, pairs)
    return _mendelian_repair(ped)


def _consistent(child: Pair, father: Pair | None, mother: Pair | None) -> bool:
    a, b = child
    for p, q in ((a, b), (b, a)):
        if father is not None and p not in father:
            continue
        if mother is not None and q not in mother:
            continue
        return True
    return False


def _mendelian_exhaustive(ped: Pedigree, pairs: list[Pair]) -> dict[int, Pair]:
    ids = [ind.id for ind in ped.individuals]
    best: dict[int, Pair] | None = None
    best_cost = None
    for combo in itertools.product(pairs, repeat=len(ids)):
        assign = dict(zip(ids, combo))
        ok = True
        for ind in ped.individuals:
            father = assign[ind.father] if ind.father != 0 else None
            mother = assign[ind.mother] if ind.mother != 0 else None
            if (father is not None or mother is not None) and not _consistent(
                assign[ind.id], father, mother
            ):
                ok = False
                break
        if not ok:
            continue
        cost = sum(
            1
            for ind in ped.individuals
            if ind.genotype is not None and assign[ind.id] != ind.genotype
        )
        if best_cost is None or cost < best_cost:
            best, best_cost = assign, cost
    if best is None:
        raise SolverFailure("no consistent genotype assignment exists")
    return best


def _mendelian_repair(ped: Pedigree) -> dict[int, Pair]:
    """Process parents before children; keep observations whenever inheritable."""
    by_id = ped.by_id()
    order: list[int] = []
    state: dict[int, int] = {}

    def visit(i: int) -> None:
        if state.get(i):
            return
        state[i] = 1
        ind = by_id[i]
        for parent in (ind.father, ind.mother):
            if parent != 0:
                visit(parent)
        order.append(i)

    for ind in ped.individuals:
        visit(ind.id)

    assign: dict[int, Pair] = {}
    for i in order:
        ind = by_id[i]
        father = assign[ind.father] if ind.father != 0 else None
        mother = assign[ind.mother] if ind.mother != 0 else None
        if father is None and mother is None:
            assign[i] = ind.genotype if ind.genotype is not None else (1, 1)
            continue
        candidates = set()
        f_options = father if father is not None else tuple(range(1, ped.alleles + 1))
        m_options = mother if mother is not None else tuple(range(1, ped.alleles + 1))
        for p in f_options:
            for q in m_options:
                candidates.add(as_pair(p, q))
        if ind.genotype is not None and ind.genotype in candidates:
            assign[i] = ind.genotype
        else:
            assign[i] = min(candidates)
    return assign
