"""Pickup-and-delivery routing with time windows and capacity.

Instance files follow the classic text layout: a header line with the
vehicle count and capacity, then one line per location with

    id x y demand earliest latest service pickup_partner delivery_partner

where the depot is the id-0 row, pickups have positive demand and name
their delivery in the last column, and deliveries have the negated demand
and name their pickup in the second-to-last column.  A solution lists one
route per line as whitespace-separated location ids; the depot is implicit
at both ends.

Arrival recursion per route (waiting allowed):
    arrival_k = max(earliest_k, arrival_{k-1} + service_{k-1} + dist(k-1, k))
with the vehicle leaving the depot at the depot's earliest time and the
return to the depot due by the depot's latest time.  Distances are exact
Euclidean doubles, never rounded.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register


@dataclass(frozen=True)
class Location:
    id: int
    x: float
    y: float
    demand: float
    earliest: float
    latest: float
    service: float
    pickup_partner: int     # 0 on pickups, pickup id on deliveries
    delivery_partner: int   # delivery id on pickups, 0 on deliveries


@dataclass(frozen=True)
class PdptwInstance:
    vehicles: int
    capacity: float
    depot: Location
    locations: dict[int, Location]

    def pickups(self) -> list[Location]:
        return [loc for loc in self.locations.values() if loc.demand > 0]


@dataclass(frozen=True)
class RoutePlan:
    routes: tuple[tuple[int, ...], ...]


def distance(a: Location, b: Location) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return (dx * dx + dy * dy) ** 0.5


def parse_instance(payload: bytes) -> PdptwInstance:
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InstanceFormatError(f"not UTF-8 text: {exc}") from exc
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise InstanceFormatError("empty instance file")
    header = rows[0]
    if len(header) < 2:
        raise InstanceFormatError("header must carry vehicle count and capacity")
    try:
        vehicles = int(header[0])
        capacity = float(header[1])
        locations: dict[int, Location] = {}
        for row in rows[1:]:
            if len(row) != 9:
                raise InstanceFormatError(f"location row needs 9 fields, got {len(row)}")
            loc = Location(
                id=int(row[0]),
                x=float(row[1]),
                y=float(row[2]),
                demand=float(row[3]),
                earliest=float(row[4]),
                latest=float(row[5]),
                service=float(row[6]),
                pickup_partner=int(row[7]),
                delivery_partner=int(row[8]),
            )
            if loc.id in locations:
                raise InstanceFormatError(f"duplicate location id {loc.id}")
            locations[loc.id] = loc
    except ValueError as exc:
        raise InstanceFormatError(f"malformed instance row: {exc}") from exc

    if 0 not in locations:
        raise InstanceFormatError("missing depot row (id 0)")
    depot = locations.pop(0)
    if vehicles < 1 or capacity <= 0:
        raise InstanceFormatError("vehicle count and capacity must be positive")
    for loc in locations.values():
        if loc.latest < loc.earliest:
            raise InstanceFormatError(f"location {loc.id}: window is reversed")
        if loc.demand > 0:
            partner = locations.get(loc.delivery_partner)
            if partner is None or partner.demand != -loc.demand or partner.pickup_partner != loc.id:
                raise InstanceFormatError(f"pickup {loc.id} has inconsistent delivery partner")
        elif loc.demand < 0:
            partner = locations.get(loc.pickup_partner)
            if partner is None or partner.demand != -loc.demand or partner.delivery_partner != loc.id:
                raise InstanceFormatError(f"delivery {loc.id} has inconsistent pickup partner")
        else:
            raise InstanceFormatError(f"location {loc.id} has zero demand")
    if depot.latest < depot.earliest:
        raise InstanceFormatError("depot window is reversed")
    return PdptwInstance(vehicles=vehicles, capacity=capacity, depot=depot, locations=locations)


def parse_solution(inst: PdptwInstance, text: str) -> RoutePlan:
    routes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        try:
            routes.append(tuple(int(t) for t in tokens))
        except ValueError as exc:
            raise SolutionFormatError(f"line {lineno}: location ids must be integers") from exc
    if not routes and inst.locations:
        raise SolutionFormatError("no routes found")
    return RoutePlan(routes=tuple(routes))


def route_arrivals(inst: PdptwInstance, route: tuple[int, ...]) -> tuple[list[float], float]:
    """Arrival time at each stop plus the depot return time; no feasibility checks."""
    arrivals: list[float] = []
    prev = inst.depot
    t = inst.depot.earliest
    for lid in route:
        loc = inst.locations[lid]
        t = max(loc.earliest, t + prev.service + distance(prev, loc))
        arrivals.append(t)
        prev = loc
    back = t + prev.service + distance(prev, inst.depot) if route else t
    return arrivals, back


def verify(inst: PdptwInstance, plan: RoutePlan) -> list[str]:
    violations: list[str] = []
    seen: dict[int, int] = {}
    for route in plan.routes:
        for lid in route:
            seen[lid] = seen.get(lid, 0) + 1
    unknown = False
    for lid in sorted(seen):
        if lid not in inst.locations:
            violations.append(f"route visits unknown location {lid}")
            unknown = True
    for lid in sorted(inst.locations):
        count = seen.get(lid, 0)
        if count == 0:
            violations.append(f"location {lid} is not visited")
        elif count > 1:
            violations.append(f"location {lid} is visited {count} times")
    if unknown:
        # Per-route checks need every visited id to resolve to a location.
        return violations

    for ridx, route in enumerate(plan.routes, start=1):
        pos = {lid: k for k, lid in enumerate(route)}
        load = 0.0
        for lid in route:
            loc = inst.locations[lid]
            if loc.demand > 0 and loc.delivery_partner not in pos:
                violations.append(
                    f"route {ridx}: pickup {lid} and its delivery are split across routes"
                )
            if loc.demand < 0:
                if loc.pickup_partner not in pos:
                    violations.append(
                        f"route {ridx}: delivery {lid} without its pickup in the same route"
                    )
                elif pos[loc.pickup_partner] > pos[lid]:
                    violations.append(f"route {ridx}: delivery {lid} precedes its pickup")
            load += loc.demand
            if load > inst.capacity:
                violations.append(f"route {ridx}: load {load} exceeds capacity {inst.capacity} at {lid}")
            if load < 0:
                violations.append(f"route {ridx}: load drops below zero at {lid}")
        arrivals, back = route_arrivals(inst, route)
        for lid, t in zip(route, arrivals):
            loc = inst.locations[lid]
            if t > loc.latest:
                violations.append(
                    f"route {ridx}: arrives at {lid} at time {t:.3f}, window closes at {loc.latest}"
                )
        if back > inst.depot.latest:
            violations.append(
                f"route {ridx}: returns to depot at time {back:.3f}, window closes at {inst.depot.latest}"
            )
    return violations


def evaluate(inst: PdptwInstance, plan: RoutePlan) -> float:
    total = 0.0
    for route in plan.routes:
        if not route:
            continue
        prev = inst.depot
        for lid in route:
            loc = inst.locations[lid]
            total += distance(prev, loc)
            prev = loc
        total += distance(prev, inst.depot)
    return total


def format_solution(routes: list[tuple[int, ...]]) -> str:
    return "".join(" ".join(str(lid) for lid in route) + "\n" for route in routes if route)


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.PDPTW,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
