"""Reference solvers for the EDA problems."""

from __future__ import annotations

import heapq
from collections import deque

from ..problems.mapping import LUT_INPUT_LIMIT, BlifNetwork, LogicNode
from ..problems.routing import (
    OVERFLOW_WEIGHT,
    VIA_WEIGHT,
    Cell,
    Edge,
    RouteGrid,
    RoutingSolution,
    canonical_edge,
)
from ..problems.scheduling import SchedInstance
from . import SolverFailure

# --- operator scheduling: resource-constrained list scheduling ---------------


def baseline_schedule(inst: SchedInstance) -> dict[str, int]:
    """List scheduling with ALAP-time priority (least slack first)."""
    names = sorted(inst.nodes)
    succs: dict[str, list[str]] = {n: [] for n in names}
    preds: dict[str, list[str]] = {n: [] for n in names}
    for src, dst, _ in inst.edges:
        succs[src].append(dst)
        preds[dst].append(src)

    order = _topo_order(names, preds, succs)
    serial_bound = sum(inst.node_delay(n) for n in names)
    alap: dict[str, int] = {}
    for n in reversed(order):
        limit = serial_bound
        for s in succs[n]:
            limit = min(limit, alap[s])
        alap[n] = limit - inst.node_delay(n)

    start: dict[str, int] = {}
    unscheduled = set(names)
    busy: dict[tuple[str, int], int] = {}
    t = 0
    while unscheduled:
        ready = sorted(
            (n for n in unscheduled
             if all(p in start for p in preds[n])
             and max((start[p] + inst.node_delay(p) for p in preds[n]), default=0) <= t),
            key=lambda n: (alap[n], n),
        )
        for n in ready:
            rtype = inst.nodes[n]
            d = inst.delay[rtype]
            if all(busy.get((rtype, c), 0) < inst.resource[rtype] for c in range(t, t + d)):
                start[n] = t
                for c in range(t, t + d):
                    busy[(rtype, c)] = busy.get((rtype, c), 0) + 1
                unscheduled.discard(n)
        t += 1
        if t > 4 * serial_bound + 4:
            raise SolverFailure("list scheduler failed to place all operations")
    return start


def _topo_order(names, preds, succs) -> list[str]:
    indeg = {n: len(preds[n]) for n in names}
    queue = deque(sorted(n for n in names if indeg[n] == 0))
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in sorted(succs[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if len(order) != len(names):
        raise SolverFailure("dependency graph is cyclic")
    return order


# --- technology mapping: priority-cut enumeration + DP covering --------------

#: Per-node cut cap by network size: generous for small nets, tight for big ones.
CUT_CAP_SCHEDULE = ((1500, 64), (3000, 48), (5000, 32))
CUT_CAP_FLOOR = 20


def _cut_cap(num_nodes: int) -> int:
    for limit, cap in CUT_CAP_SCHEDULE:
        if num_nodes <= limit:
            return cap
    return CUT_CAP_FLOOR


def baseline_map(net: BlifNetwork) -> BlifNetwork:
    """Area-oriented LUT covering via capped cut enumeration and DP selection."""
    order = _reachable_topo(net)
    index = {name: i for i, name in enumerate(order)}
    n = len(order)
    cap = _cut_cap(n)

    is_leaf = [False] * n
    for i, name in enumerate(order):
        node = net.nodes.get(name)
        is_leaf[i] = node is None or node.const is not None

    cost = [0] * n
    best_cut: list[int | None] = [None] * n
    cuts: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (leaf mask, score)

    def cut_score(mask: int) -> int:
        score = 0
        m = mask
        while m:
            lsb = m & -m
            score += cost[lsb.bit_length() - 1]
            m ^= lsb
        return score

    def prune(items: list[tuple[int, int]]) -> list[tuple[int, int]]:
        kept: list[tuple[int, int]] = []
        for mask, score in sorted(items, key=lambda it: (it[1], it[0].bit_count(), it[0])):
            if any((pm & mask) == pm and ps <= score for pm, ps in kept):
                continue
            kept.append((mask, score))
            if len(kept) >= cap:
                break
        return kept

    for i, name in enumerate(order):
        if is_leaf[i]:
            cuts[i] = [(1 << i, 0)]
            continue
        fan_idx = [index[s] for s in net.nodes[name].inputs]
        merged: list[tuple[int, int]] | None = None
        for f in sorted(fan_idx, key=lambda j: len(cuts[j])):
            if merged is None:
                merged = cuts[f][:cap]
                continue
            combos: dict[int, int] = {}
            for m1, _ in merged:
                for m2, _ in cuts[f][:cap]:
                    union = m1 | m2
                    if union.bit_count() <= LUT_INPUT_LIMIT and union not in combos:
                        combos[union] = cut_score(union)
            merged = prune(list(combos.items()))
            if not merged:
                break
        merged = merged or []
        fanin_mask = 0
        for f in fan_idx:
            fanin_mask |= 1 << f
        if fanin_mask.bit_count() <= LUT_INPUT_LIMIT and all(m != fanin_mask for m, _ in merged):
            merged.append((fanin_mask, cut_score(fanin_mask)))
        merged = prune(merged)

        self_mask = 1 << i
        chosen = None
        chosen_value = None
        for mask, score in merged:
            if mask == self_mask:
                continue
            value = score + 1
            if chosen_value is None or value < chosen_value:
                chosen_value = value
                chosen = mask
        if chosen is None:
            if fanin_mask.bit_count() > LUT_INPUT_LIMIT:
                raise SolverFailure(f"node {name!r} fan-in exceeds the LUT input limit")
            chosen = fanin_mask
            chosen_value = cut_score(fanin_mask) + 1
        cost[i] = chosen_value
        best_cut[i] = chosen
        merged.append((self_mask, cost[i]))
        cuts[i] = prune(merged)

    mapped: set[int] = set()
    stack = [index[po] for po in net.outputs if po in index and not is_leaf[index[po]]]
    while stack:
        u = stack.pop()
        if u in mapped:
            continue
        mapped.add(u)
        m = best_cut[u]
        assert m is not None
        while m:
            lsb = m & -m
            j = lsb.bit_length() - 1
            m ^= lsb
            if not is_leaf[j] and j not in mapped:
                stack.append(j)

    # Constant leaves feeding a mapped LUT must be re-emitted as LUTs too.
    const_needed: set[str] = set()
    for i in sorted(mapped):
        m = best_cut[i]
        while m:
            lsb = m & -m
            j = lsb.bit_length() - 1
            m ^= lsb
            leaf = order[j]
            if leaf in net.nodes and net.nodes[leaf].const is not None:
                const_needed.add(leaf)
    for po in net.outputs:
        if po in net.nodes and net.nodes[po].const is not None:
            const_needed.add(po)

    out_nodes: dict[str, LogicNode] = {}
    emit_order: list[str] = []
    for name in order:
        if name in const_needed:
            out_nodes[name] = LogicNode(inputs=(), rows=(), output_bit="1", const=net.nodes[name].const)
            emit_order.append(name)
    for i in sorted(mapped):
        name = order[i]
        mask = best_cut[i]
        leaves = []
        m = mask
        while m:
            lsb = m & -m
            leaves.append(order[lsb.bit_length() - 1])
            m ^= lsb
        out_nodes[name] = _lut_from_cone(net, name, leaves)
        emit_order.append(name)

    return BlifNetwork(name=net.name, inputs=net.inputs, outputs=net.outputs,
                       nodes={k: out_nodes[k] for k in emit_order})


def _reachable_topo(net: BlifNetwork) -> list[str]:
    """Signals reachable from the primary outputs, in dependency order."""
    reachable: set[str] = set()
    stack = [po for po in net.outputs]
    while stack:
        s = stack.pop()
        if s in reachable:
            continue
        reachable.add(s)
        node = net.nodes.get(s)
        if node is not None:
            stack.extend(node.inputs)
    indeg: dict[str, int] = {}
    succs: dict[str, list[str]] = {s: [] for s in reachable}
    for s in reachable:
        node = net.nodes.get(s)
        indeg[s] = 0 if node is None else len(node.inputs)
        if node is not None:
            for src in node.inputs:
                succs[src].append(s)
    queue = deque(sorted(s for s in reachable if indeg[s] == 0))
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in sorted(succs[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if len(order) != len(reachable):
        raise SolverFailure("network contains a combinational cycle")
    return order


def _lut_from_cone(net: BlifNetwork, root: str, leaves: list[str]) -> LogicNode:
    """Truth table of `root` as a function of `leaves`, emitted as on-set rows."""
    leaves = sorted(leaves)
    k = len(leaves)
    width = 1 << k
    full = (1 << width) - 1
    values: dict[str, int] = {}
    for bit, leaf in enumerate(leaves):
        m = 0
        for p in range(width):
            if (p >> bit) & 1:
                m |= 1 << p
        values[leaf] = m

    def eval_signal(sig: str) -> int:
        if sig in values:
            return values[sig]
        node = net.nodes[sig]
        if node.const is not None:
            v = full if node.const == 1 else 0
        else:
            acc = 0
            for pattern in node.rows:
                m = full
                for ch, src in zip(pattern, node.inputs):
                    if ch == "1":
                        m &= eval_signal(src)
                    elif ch == "0":
                        m &= ~eval_signal(src) & full
                acc |= m
            v = acc if node.output_bit == "1" else ~acc & full
        values[sig] = v
        return v

    table = eval_signal(root)
    rows = []
    for p in range(width):
        if (table >> p) & 1:
            rows.append("".join("1" if (p >> bit) & 1 else "0" for bit in range(k)))
    if k == 0:
        return LogicNode(inputs=(), rows=(), output_bit="1", const=1 if table & 1 else 0)
    return LogicNode(inputs=tuple(leaves), rows=tuple(rows), output_bit="1")


# --- global routing: MST decomposition + congestion-aware maze routing -------


def baseline_route(grid: RouteGrid) -> RoutingSolution:
    segments: dict[str, frozenset[Edge]] = {}
    vias: dict[str, frozenset[Edge]] = {}
    usage: dict[Edge, int] = {}

    for name in sorted(grid.nets):
        pins = list(dict.fromkeys(grid.nets[name]))
        net_edges: set[Edge] = set()
        net_vias: set[Edge] = set()
        connected: set[Cell] = {pins[0]}
        for _ in pins[1:]:
            target = min(
                (p for p in pins if p not in connected),
                key=lambda p: (min(_manhattan(p, c) for c in connected), p),
                default=None,
            )
            if target is None:
                break
            path = _maze_route(grid, connected, target, usage)
            if path is None:
                raise SolverFailure(f"net {name!r}: no path to pin {target}")
            for a, b in zip(path, path[1:]):
                if a[2] != b[2]:
                    net_vias.add(canonical_edge(a, b))
                else:
                    edge = canonical_edge(a, b)
                    net_edges.add(edge)
                connected.add(a)
                connected.add(b)
        for edge in net_edges:
            usage[edge] = usage.get(edge, 0) + 1
        segments[name] = frozenset(net_edges)
        vias[name] = frozenset(net_vias)
    return RoutingSolution(segments=segments, vias=vias)


def _manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])


def _neighbors(grid: RouteGrid, cell: Cell):
    x, y, l = cell
    if grid.direction[l] == "H":
        steps = ((1, 0, 0), (-1, 0, 0))
    else:
        steps = ((0, 1, 0), (0, -1, 0))
    for dx, dy, dl in steps + ((0, 0, 1), (0, 0, -1)):
        nxt = (x + dx, y + dy, l + dl)
        if grid.in_grid(nxt):
            yield nxt


def _step_cost(grid: RouteGrid, a: Cell, b: Cell, usage: dict[Edge, int]) -> float:
    if a[2] != b[2]:
        return VIA_WEIGHT
    edge = canonical_edge(a, b)
    cost = 1.0
    if usage.get(edge, 0) >= grid.edge_capacity(edge):
        cost += OVERFLOW_WEIGHT
    return cost


def _maze_route(grid: RouteGrid, sources: set[Cell], target: Cell,
                usage: dict[Edge, int]) -> list[Cell] | None:
    dist: dict[Cell, float] = {}
    prev: dict[Cell, Cell] = {}
    heap: list[tuple[float, Cell]] = []
    for s in sorted(sources):
        dist[s] = 0.0
        heapq.heappush(heap, (0.0, s))
    while heap:
        d, cell = heapq.heappop(heap)
        if d > dist.get(cell, float("inf")):
            continue
        if cell == target:
            path = [cell]
            while path[-1] in prev:
                path.append(prev[path[-1]])
            path.reverse()
            return path
        for nxt in _neighbors(grid, cell):
            nd = d + _step_cost(grid, cell, nxt, usage)
            if nd < dist.get(nxt, float("inf")):
                dist[nxt] = nd
                prev[nxt] = cell
                heapq.heappush(heap, (nd, nxt))
    return None
