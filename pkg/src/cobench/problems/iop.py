"""Intra-operator parallelism: choose one execution strategy per node.

Instances are JSON: a memory ``budget``, ``nodes`` with an alive interval
[lo, hi) and a list of strategies (cost, usage), and ``edges`` carrying a
cost matrix indexed by the endpoint strategies.  A solution assigns one
strategy index per node, written as ``node_index strategy_index`` lines.
Peak memory is checked at integer times over half-open intervals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register


@dataclass(frozen=True)
class IopNode:
    lo: int
    hi: int
    costs: tuple[float, ...]
    usages: tuple[float, ...]


@dataclass(frozen=True)
class IopEdge:
    u: int
    v: int
    matrix: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class IopGraph:
    budget: float
    nodes: tuple[IopNode, ...]
    edges: tuple[IopEdge, ...]


@dataclass(frozen=True)
class StrategyAssignment:
    strategy: dict[int, int]
    duplicates: tuple[int, ...] = ()


def parse_instance(payload: bytes) -> IopGraph:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    try:
        budget = float(doc["budget"])
        nodes = []
        for spec in doc["nodes"]:
            lo, hi = int(spec["interval"][0]), int(spec["interval"][1])
            costs = tuple(float(s["cost"]) for s in spec["strategies"])
            usages = tuple(float(s["usage"]) for s in spec["strategies"])
            nodes.append(IopNode(lo=lo, hi=hi, costs=costs, usages=usages))
        edges = []
        for spec in doc.get("edges", []):
            matrix = tuple(tuple(float(x) for x in row) for row in spec["matrix"])
            edges.append(IopEdge(u=int(spec["u"]), v=int(spec["v"]), matrix=matrix))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed parallelism instance: {exc}") from exc

    if budget < 0 or not math.isfinite(budget):
        raise InstanceFormatError("budget must be a finite non-negative number")
    for i, node in enumerate(nodes):
        if not node.costs:
            raise InstanceFormatError(f"node {i} has no strategies")
        if node.hi < node.lo:
            raise InstanceFormatError(f"node {i} interval is reversed")
        if any(c < 0 for c in node.costs) or any(u < 0 for u in node.usages):
            raise InstanceFormatError(f"node {i} has negative cost or usage")
    for e in edges:
        if not (0 <= e.u < len(nodes)) or not (0 <= e.v < len(nodes)):
            raise InstanceFormatError(f"edge ({e.u}, {e.v}) references unknown node")
        if len(e.matrix) != len(nodes[e.u].costs) or any(
            len(row) != len(nodes[e.v].costs) for row in e.matrix
        ):
            raise InstanceFormatError(f"edge ({e.u}, {e.v}) matrix shape mismatch")
    return IopGraph(budget=budget, nodes=tuple(nodes), edges=tuple(edges))


def parse_solution(inst: IopGraph, text: str) -> StrategyAssignment:
    strategy: dict[int, int] = {}
    duplicates: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionFormatError(f"line {lineno}: expected 'node strategy', got {line!r}")
        try:
            node, strat = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise SolutionFormatError(f"line {lineno}: indices must be integers") from exc
        if node in strategy:
            duplicates.append(node)
        strategy[node] = strat
    if not strategy:
        raise SolutionFormatError("no strategy assignments found")
    return StrategyAssignment(strategy=strategy, duplicates=tuple(duplicates))


def verify(inst: IopGraph, assignment: StrategyAssignment) -> list[str]:
    violations: list[str] = []
    for node in assignment.duplicates:
        violations.append(f"node {node} assigned more than once")
    for node, strat in sorted(assignment.strategy.items()):
        if not 0 <= node < len(inst.nodes):
            violations.append(f"unknown node index {node}")
        elif not 0 <= strat < len(inst.nodes[node].costs):
            violations.append(f"node {node}: strategy index {strat} out of range")
    for i in range(len(inst.nodes)):
        if i not in assignment.strategy:
            violations.append(f"node {i} has no assigned strategy")
    if violations:
        return violations

    for t, used in peak_profile(inst, assignment.strategy):
        if used > inst.budget:
            violations.append(
                f"memory over budget at time {t}: {used} used, budget {inst.budget}"
            )
    return violations


def peak_profile(inst: IopGraph, strategy: dict[int, int]) -> list[tuple[int, float]]:
    """Memory in use at each integer time where the profile can change (event sweep)."""
    events: dict[int, float] = {}
    for i, node in enumerate(inst.nodes):
        if node.hi == node.lo:
            continue
        u = node.usages[strategy[i]]
        events[node.lo] = events.get(node.lo, 0.0) + u
        events[node.hi] = events.get(node.hi, 0.0) - u
    profile = []
    used = 0.0
    for t in sorted(events):
        used += events[t]
        profile.append((t, used))
    return profile


def evaluate(inst: IopGraph, assignment: StrategyAssignment) -> float:
    total = sum(node.costs[assignment.strategy[i]] for i, node in enumerate(inst.nodes))
    for e in inst.edges:
        total += e.matrix[assignment.strategy[e.u]][assignment.strategy[e.v]]
    return float(total)


def format_solution(strategy: dict[int, int]) -> str:
    return "".join(f"{node} {strat}\n" for node, strat in sorted(strategy.items()))


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.INTRA_OP_PARALLELISM,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
