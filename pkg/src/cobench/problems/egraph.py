"""E-graph extraction: pick one e-node per needed e-class at minimum DAG cost.

Instances are JSON: ``classes`` maps class id -> member node ids, ``nodes``
maps node id -> {cost, children}, ``roots`` lists the required classes.
A selection is written as ``class_id node_id`` lines.  Feasibility: all
roots selected, children of every chosen node selected, and the induced
class graph acyclic.  Cost sums each chosen node once, so shared subterms
are not double-counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register


@dataclass(frozen=True)
class ENode:
    cost: float
    children: tuple[str, ...]  # child e-class ids


@dataclass(frozen=True)
class EGraph:
    classes: dict[str, tuple[str, ...]]   # class id -> member node ids
    nodes: dict[str, ENode]
    roots: tuple[str, ...]
    node_class: dict[str, str]            # node id -> owning class


@dataclass(frozen=True)
class ExtractionSelection:
    chosen: dict[str, str]                # class id -> node id
    duplicates: tuple[str, ...] = ()


def parse_instance(payload: bytes) -> EGraph:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    try:
        classes = {str(c): tuple(str(n) for n in members) for c, members in doc["classes"].items()}
        nodes = {
            str(n): ENode(cost=float(spec["cost"]), children=tuple(str(c) for c in spec["children"]))
            for n, spec in doc["nodes"].items()
        }
        roots = tuple(str(r) for r in doc["roots"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed e-graph: {exc}") from exc

    node_class: dict[str, str] = {}
    for cid, members in classes.items():
        for nid in members:
            if nid in node_class:
                raise InstanceFormatError(f"e-node {nid!r} belongs to more than one class")
            node_class[nid] = cid
    for nid in nodes:
        if nid not in node_class:
            raise InstanceFormatError(f"e-node {nid!r} belongs to no class")
    for nid, node in nodes.items():
        if node.cost < 0 or not math.isfinite(node.cost):
            raise InstanceFormatError(f"e-node {nid!r} has invalid cost {node.cost}")
        for child in node.children:
            if child not in classes:
                raise InstanceFormatError(f"e-node {nid!r} references unknown class {child!r}")
    for cid, members in classes.items():
        for nid in members:
            if nid not in nodes:
                raise InstanceFormatError(f"class {cid!r} lists unknown e-node {nid!r}")
    if not roots:
        raise InstanceFormatError("e-graph has no root class")
    for r in roots:
        if r not in classes:
            raise InstanceFormatError(f"unknown root class {r!r}")
    return EGraph(classes=classes, nodes=nodes, roots=roots, node_class=node_class)


def parse_solution(inst: EGraph, text: str) -> ExtractionSelection:
    chosen: dict[str, str] = {}
    duplicates: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionFormatError(f"line {lineno}: expected 'class_id node_id', got {line!r}")
        cid, nid = parts
        if cid in chosen:
            duplicates.append(cid)
        chosen[cid] = nid
    if not chosen:
        raise SolutionFormatError("no selections found")
    return ExtractionSelection(chosen=chosen, duplicates=tuple(duplicates))


def verify(inst: EGraph, sel: ExtractionSelection) -> list[str]:
    violations: list[str] = []
    for cid in sel.duplicates:
        violations.append(f"class {cid!r} selected more than once")
    for cid, nid in sorted(sel.chosen.items()):
        if cid not in inst.classes:
            violations.append(f"selection names unknown class {cid!r}")
        elif nid not in inst.nodes:
            violations.append(f"selection names unknown e-node {nid!r}")
        elif inst.node_class[nid] != cid:
            violations.append(f"e-node {nid!r} does not belong to class {cid!r}")
    if violations:
        return violations

    for r in inst.roots:
        if r not in sel.chosen:
            violations.append(f"root class {r!r} is not selected")
    for cid, nid in sorted(sel.chosen.items()):
        for child in inst.nodes[nid].children:
            if child not in sel.chosen:
                violations.append(
                    f"class {child!r} is required by chosen e-node {nid!r} but not selected"
                )
    if violations:
        return violations

    # Cycle check over the induced class -> child-class graph.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {cid: WHITE for cid in sel.chosen}
    for start in sorted(sel.chosen):
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            cid, idx = stack[-1]
            children = inst.nodes[sel.chosen[cid]].children
            if idx == len(children):
                color[cid] = BLACK
                stack.pop()
                continue
            stack[-1] = (cid, idx + 1)
            child = children[idx]
            if color[child] == GRAY:
                violations.append(f"selection is cyclic through class {child!r}")
                return violations
            if color[child] == WHITE:
                color[child] = GRAY
                stack.append((child, 0))
    return violations


def evaluate(inst: EGraph, sel: ExtractionSelection) -> float:
    return float(sum(inst.nodes[nid].cost for nid in sel.chosen.values()))


def format_solution(sel: dict[str, str]) -> str:
    return "".join(f"{cid} {nid}\n" for cid, nid in sorted(sel.items()))


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.EGRAPH_EXTRACTION,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
