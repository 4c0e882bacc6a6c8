"""Operator scheduling: place DAG operations into cycles under resource bounds.

Instance files are JSON with keys ``name``, ``delay``, ``resource``,
``nodes`` and ``edges``.  A solution assigns every node a start cycle,
written one ``node:cycle`` line per node.  An operation of delay d started
at cycle t occupies one unit of its resource type during every cycle of
[t, t+d).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register


@dataclass(frozen=True)
class SchedInstance:
    name: str
    delay: dict[str, int]        # resource type -> cycles
    resource: dict[str, int]     # resource type -> available units
    nodes: dict[str, str]        # node id -> resource type
    edges: tuple[tuple[str, str, str], ...]

    def node_delay(self, node: str) -> int:
        return self.delay[self.nodes[node]]


@dataclass(frozen=True)
class Schedule:
    start: dict[str, int]
    duplicates: tuple[str, ...] = ()


def parse_instance(payload: bytes) -> SchedInstance:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    try:
        delay = {str(k): int(v) for k, v in doc["delay"].items()}
        resource = {str(k): int(v) for k, v in doc["resource"].items()}
        nodes = {}
        for entry in doc["nodes"]:
            nid, rtype = str(entry[0]), str(entry[1])
            if nid in nodes:
                raise InstanceFormatError(f"duplicate node id {nid!r}")
            nodes[nid] = rtype
        edges = tuple((str(e[0]), str(e[1]), str(e[2]) if len(e) > 2 else "") for e in doc["edges"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed scheduling instance: {exc}") from exc

    for rtype, d in delay.items():
        if d < 1:
            raise InstanceFormatError(f"delay of {rtype!r} must be >= 1")
    for rtype, g in resource.items():
        if g < 1:
            raise InstanceFormatError(f"availability of {rtype!r} must be >= 1")
    for nid, rtype in nodes.items():
        if rtype not in delay or rtype not in resource:
            raise InstanceFormatError(f"node {nid!r} uses unknown resource type {rtype!r}")
    for src, dst, _ in edges:
        if src not in nodes or dst not in nodes:
            raise InstanceFormatError(f"edge ({src!r}, {dst!r}) references unknown node")

    inst = SchedInstance(
        name=str(doc.get("name", "")),
        delay=delay,
        resource=resource,
        nodes=nodes,
        edges=edges,
    )
    if _has_cycle(inst):
        raise InstanceFormatError("dependency graph is cyclic")
    return inst


def _has_cycle(inst: SchedInstance) -> bool:
    indeg = {n: 0 for n in inst.nodes}
    succs: dict[str, list[str]] = {n: [] for n in inst.nodes}
    for src, dst, _ in inst.edges:
        indeg[dst] += 1
        succs[src].append(dst)
    stack = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for v in succs[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    return seen != len(inst.nodes)


def parse_solution(inst: SchedInstance, text: str) -> Schedule:
    start: dict[str, int] = {}
    duplicates: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if ":" not in line:
            raise SolutionFormatError(f"line {lineno}: expected 'node:cycle', got {line!r}")
        node, _, cycle_s = line.partition(":")
        node = node.strip()
        try:
            cycle = int(cycle_s.strip())
        except ValueError as exc:
            raise SolutionFormatError(f"line {lineno}: start cycle {cycle_s.strip()!r} is not an integer") from exc
        if node in start:
            duplicates.append(node)
        start[node] = cycle
    if not start:
        raise SolutionFormatError("no schedule assignments found")
    return Schedule(start=start, duplicates=tuple(duplicates))


def verify(inst: SchedInstance, sched: Schedule) -> list[str]:
    violations: list[str] = []
    for node in sched.duplicates:
        violations.append(f"node {node!r} assigned more than once")
    for node in sched.start:
        if node not in inst.nodes:
            violations.append(f"unknown node {node!r} in schedule")
    for node in inst.nodes:
        if node not in sched.start:
            violations.append(f"node {node!r} missing from schedule")
    for node, t in sched.start.items():
        if node in inst.nodes and t < 0:
            violations.append(f"node {node!r} starts at negative cycle {t}")
    if violations:
        return violations

    for src, dst, _ in inst.edges:
        finish = sched.start[src] + inst.node_delay(src)
        if finish > sched.start[dst]:
            violations.append(
                f"dependency violated: {src!r} finishes at cycle {finish} "
                f"but {dst!r} starts at cycle {sched.start[dst]}"
            )

    # Strict multi-cycle occupancy: busy during every cycle of [t, t+d).
    occupancy: dict[tuple[str, int], int] = {}
    for node, t in sched.start.items():
        rtype = inst.nodes[node]
        for c in range(t, t + inst.delay[rtype]):
            occupancy[(rtype, c)] = occupancy.get((rtype, c), 0) + 1
    for (rtype, c), used in sorted(occupancy.items()):
        if used > inst.resource[rtype]:
            violations.append(
                f"resource {rtype!r} oversubscribed at cycle {c}: "
                f"{used} in use, {inst.resource[rtype]} available"
            )
    return violations


def evaluate(inst: SchedInstance, sched: Schedule) -> float:
    if not inst.nodes:
        return 0.0
    return float(max(t + inst.node_delay(n) for n, t in sched.start.items() if n in inst.nodes))


def format_solution(start: dict[str, int]) -> str:
    return "".join(f"{node}:{cycle}\n" for node, cycle in sorted(start.items()))


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.OPERATOR_SCHEDULING,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
