"""Simplified grid-based global routing.

The chip is a grid of GCells, ``X`` columns by ``Y`` rows by ``L`` layers.
Every layer has a preferred direction: ``H`` layers only carry unit edges
along x, ``V`` layers along y.  Vias connect vertically adjacent layers at
one (x, y).  Instance and solution formats are line-oriented text; the
grammar lives in docs/formats.md.

Cost of a feasible solution:
    total unit wirelength + 2 * vias + 500 * sum over edges of max(0, usage - capacity)
where usage counts each net at most once per edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register

VIA_WEIGHT = 2.0
OVERFLOW_WEIGHT = 500.0

Cell = tuple[int, int, int]          # (x, y, layer)
Edge = tuple[Cell, Cell]             # canonical: smaller endpoint first


@dataclass(frozen=True)
class RouteGrid:
    x: int
    y: int
    layers: int
    direction: tuple[str, ...]                 # per layer, 'H' or 'V'
    default_capacity: tuple[int, ...]          # per layer
    capacity_overrides: dict[Edge, int]
    nets: dict[str, tuple[Cell, ...]]          # net name -> pin cells

    def in_grid(self, cell: Cell) -> bool:
        cx, cy, cl = cell
        return 0 <= cx < self.x and 0 <= cy < self.y and 0 <= cl < self.layers

    def edge_capacity(self, edge: Edge) -> int:
        if edge in self.capacity_overrides:
            return self.capacity_overrides[edge]
        return self.default_capacity[edge[0][2]]


@dataclass(frozen=True)
class RoutingSolution:
    segments: dict[str, frozenset[Edge]] = field(default_factory=dict)
    vias: dict[str, frozenset[Edge]] = field(default_factory=dict)


def canonical_edge(a: Cell, b: Cell) -> Edge:
    return (a, b) if a <= b else (b, a)


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_instance(payload: bytes) -> RouteGrid:
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InstanceFormatError(f"not UTF-8 text: {exc}") from exc

    dims: tuple[int, int, int] | None = None
    direction: dict[int, str] = {}
    default_cap: dict[int, int] = {}
    overrides: dict[Edge, int] = {}
    nets: dict[str, list[Cell]] = {}
    current: str | None = None

    for lineno, tok in _tokens(text):
        kind = tok[0]
        try:
            if kind == "grid":
                dims = (int(tok[1]), int(tok[2]), int(tok[3]))
            elif kind == "layer":
                l, d, cap = int(tok[1]), tok[2], int(tok[3])
                if d not in ("H", "V"):
                    raise InstanceFormatError(f"line {lineno}: layer direction must be H or V")
                direction[l] = d
                default_cap[l] = cap
            elif kind == "capacity":
                x1, y1, l1, x2, y2, cap = (int(v) for v in tok[1:7])
                overrides[canonical_edge((x1, y1, l1), (x2, y2, l1))] = cap
            elif kind == "net":
                current = tok[1]
                if current in nets:
                    raise InstanceFormatError(f"line {lineno}: duplicate net {current!r}")
                nets[current] = []
            elif kind == "pin":
                if current is None:
                    raise InstanceFormatError(f"line {lineno}: pin outside a net block")
                nets[current].append((int(tok[1]), int(tok[2]), int(tok[3])))
            elif kind == "end":
                current = None
            else:
                raise InstanceFormatError(f"line {lineno}: unknown directive {kind!r}")
        except (IndexError, ValueError) as exc:
            raise InstanceFormatError(f"line {lineno}: malformed {kind!r} line") from exc

    if dims is None:
        raise InstanceFormatError("missing grid header")
    x, y, layers = dims
    if x < 1 or y < 1 or layers < 1:
        raise InstanceFormatError("grid dimensions must be positive")
    for l in range(layers):
        if l not in direction:
            raise InstanceFormatError(f"layer {l} has no direction/capacity line")
        if default_cap[l] < 0:
            raise InstanceFormatError(f"layer {l} capacity must be >= 0")

    grid = RouteGrid(
        x=x,
        y=y,
        layers=layers,
        direction=tuple(direction[l] for l in range(layers)),
        default_capacity=tuple(default_cap[l] for l in range(layers)),
        capacity_overrides=overrides,
        nets={name: tuple(pins) for name, pins in nets.items()},
    )
    for name, pins in grid.nets.items():
        if not pins:
            raise InstanceFormatError(f"net {name!r} has no pins")
        for pin in pins:
            if not grid.in_grid(pin):
                raise InstanceFormatError(f"net {name!r} pin {pin} outside the grid")
    for edge, cap in overrides.items():
        if cap < 0:
            raise InstanceFormatError(f"capacity override on {edge} must be >= 0")
    return grid


def _unit_edges(x1: int, y1: int, x2: int, y2: int, layer: int) -> list[Edge]:
    if x1 == x2:
        lo, hi = sorted((y1, y2))
        return [canonical_edge((x1, yy, layer), (x1, yy + 1, layer)) for yy in range(lo, hi)]
    if y1 == y2:
        lo, hi = sorted((x1, x2))
        return [canonical_edge((xx, y1, layer), (xx + 1, y1, layer)) for xx in range(lo, hi)]
    raise SolutionFormatError(f"segment ({x1},{y1})-({x2},{y2}) is not axis-aligned")


def parse_solution(grid: RouteGrid, text: str) -> RoutingSolution:
    segments: dict[str, set[Edge]] = {}
    vias: dict[str, set[Edge]] = {}
    current: str | None = None
    for lineno, tok in _tokens(text):
        kind = tok[0]
        try:
            if kind == "net":
                current = tok[1]
                segments.setdefault(current, set())
                vias.setdefault(current, set())
            elif kind == "seg":
                if current is None:
                    raise SolutionFormatError(f"line {lineno}: seg outside a net block")
                x1, y1, x2, y2, layer = (int(v) for v in tok[1:6])
                segments[current].update(_unit_edges(x1, y1, x2, y2, layer))
            elif kind == "via":
                if current is None:
                    raise SolutionFormatError(f"line {lineno}: via outside a net block")
                x, y, l1, l2 = (int(v) for v in tok[1:5])
                if l1 == l2:
                    raise SolutionFormatError(f"line {lineno}: via must span two layers")
                lo, hi = sorted((l1, l2))
                for ll in range(lo, hi):
                    vias[current].add(canonical_edge((x, y, ll), (x, y, ll + 1)))
            elif kind == "end":
                current = None
            else:
                raise SolutionFormatError(f"line {lineno}: unknown directive {kind!r}")
        except (IndexError, ValueError) as exc:
            raise SolutionFormatError(f"line {lineno}: malformed {kind!r} line") from exc
    return RoutingSolution(
        segments={k: frozenset(v) for k, v in segments.items()},
        vias={k: frozenset(v) for k, v in vias.items()},
    )


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def verify(grid: RouteGrid, sol: RoutingSolution) -> list[str]:
    violations: list[str] = []
    for name in sorted(set(sol.segments) | set(sol.vias)):
        if name not in grid.nets:
            violations.append(f"solution routes unknown net {name!r}")

    for name, pins in sorted(grid.nets.items()):
        edges = sol.segments.get(name, frozenset())
        net_vias = sol.vias.get(name, frozenset())
        uf = _UnionFind()
        for a, b in sorted(edges):
            if not grid.in_grid(a) or not grid.in_grid(b):
                violations.append(f"net {name!r} segment {a}-{b} leaves the grid")
                continue
            layer = a[2]
            if grid.direction[layer] == "H" and a[1] != b[1]:
                violations.append(f"net {name!r} segment {a}-{b} runs against layer {layer} direction H")
                continue
            if grid.direction[layer] == "V" and a[0] != b[0]:
                violations.append(f"net {name!r} segment {a}-{b} runs against layer {layer} direction V")
                continue
            uf.union(a, b)
        for a, b in sorted(net_vias):
            if not grid.in_grid(a) or not grid.in_grid(b):
                violations.append(f"net {name!r} via {a}-{b} leaves the grid")
                continue
            uf.union(a, b)
        roots = {uf.find(pin) for pin in pins}
        if len(roots) > 1:
            violations.append(f"net {name!r}: pins are not all connected")
    return violations


def evaluate(grid: RouteGrid, sol: RoutingSolution) -> float:
    wirelength = 0
    via_count = 0
    usage: dict[Edge, int] = {}
    for name in grid.nets:
        edges = sol.segments.get(name, frozenset())
        wirelength += len(edges)
        via_count += len(sol.vias.get(name, frozenset()))
        for e in edges:
            usage[e] = usage.get(e, 0) + 1
    overflow = 0
    for e, used in usage.items():
        overflow += max(0, used - grid.edge_capacity(e))
    return float(wirelength) + VIA_WEIGHT * via_count + OVERFLOW_WEIGHT * overflow


def format_solution(sol: RoutingSolution) -> str:
    lines: list[str] = []
    for name in sorted(set(sol.segments) | set(sol.vias)):
        lines.append(f"net {name}")
        for (a, b) in sorted(sol.segments.get(name, frozenset())):
            lines.append(f"seg {a[0]} {a[1]} {b[0]} {b[1]} {a[2]}")
        for (a, b) in sorted(sol.vias.get(name, frozenset())):
            lines.append(f"via {a[0]} {a[1]} {a[2]} {b[2]}")
        lines.append("end")
    return "\n".join(lines) + ("\n" if lines else "")


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.GLOBAL_ROUTING,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
