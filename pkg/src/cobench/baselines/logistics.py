"""Reference solvers for the logistics problems."""

from __future__ import annotations

from ..problems.crew import CrewInstance, Flight
from ..problems.pdptw import PdptwInstance, distance, route_arrivals
from . import SolverFailure

# --- airline crew pairing: greedy nearest-legal-continuation ------------------


def baseline_pairings(inst: CrewInstance) -> list[tuple[str, ...]]:
    """Start at the earliest base departure, always take the earliest legal
    continuation, and close the pairing as soon as the crew is back at a base."""
    uncovered = set(inst.flights)
    pairings: list[tuple[str, ...]] = []
    while uncovered:
        starts = sorted(
            (f for f in uncovered if inst.flights[f].dep in inst.bases),
            key=lambda f: (inst.flights[f].dep_min, f),
        )
        if not starts:
            raise SolverFailure("remaining flights cannot start a pairing at a base")
        legs = [starts[0]]
        uncovered.discard(starts[0])
        current = inst.flights[starts[0]]
        first_dep = current.dep_min
        while current.arr not in inst.bases:
            nxt = _earliest_continuation(inst, uncovered, current, first_dep, len(legs))
            if nxt is None:
                raise SolverFailure(f"pairing stranded at {current.arr!r} after flight {current.id!r}")
            legs.append(nxt.id)
            uncovered.discard(nxt.id)
            current = nxt
        pairings.append(tuple(legs))
    return pairings


def _earliest_continuation(inst: CrewInstance, uncovered: set[str], current: Flight,
                           first_dep: int, legs_so_far: int) -> Flight | None:
    if legs_so_far >= inst.max_legs:
        return None
    best: Flight | None = None
    for fid in sorted(uncovered):
        f = inst.flights[fid]
        if f.dep != current.arr:
            continue
        if f.dep_min < current.arr_min + inst.min_connect:
            continue
        if f.arr_min - first_dep > inst.max_span:
            continue
        if best is None or (f.dep_min, f.id) < (best.dep_min, best.id):
            best = f
    return best


# --- PDPTW: cheapest insertion + intra-route relocate --------------------------


def baseline_pdptw(inst: PdptwInstance) -> list[tuple[int, ...]]:
    routes: list[list[int]] = []
    for pickup in sorted(p.id for p in inst.pickups()):
        delivery = inst.locations[pickup].delivery_partner
        best = None  # (added_distance, route_index, pickup_pos, delivery_pos)
        for ridx, route in enumerate(routes):
            for p_pos in range(len(route) + 1):
                for d_pos in range(p_pos + 1, len(route) + 2):
                    candidate = route[:p_pos] + [pickup] + route[p_pos:d_pos - 1] + [delivery] + route[d_pos - 1:]
                    if not _route_ok(inst, candidate):
                        continue
                    added = _route_distance(inst, candidate) - _route_distance(inst, route)
                    key = (added, ridx, p_pos, d_pos)
                    if best is None or key < best:
                        best = key
        if best is not None:
            _, ridx, p_pos, d_pos = best
            route = routes[ridx]
            routes[ridx] = (
                route[:p_pos] + [pickup] + route[p_pos:d_pos - 1] + [delivery] + route[d_pos - 1:]
            )
        else:
            fresh = [pickup, delivery]
            if not _route_ok(inst, fresh):
                raise SolverFailure(f"request {pickup} infeasible even on an empty vehicle")
            routes.append(fresh)

    improved = True
    while improved:
        improved = False
        for ridx, route in enumerate(routes):
            better = _relocate_once(inst, route)
            if better is not None:
                routes[ridx] = better
                improved = True
    return [tuple(r) for r in routes]


def _relocate_once(inst: PdptwInstance, route: list[int]) -> list[int] | None:
    """First strictly-improving relocation of one request within the route."""
    base = _route_distance(inst, route)
    pickups = [lid for lid in route if inst.locations[lid].demand > 0]
    for pickup in pickups:
        delivery = inst.locations[pickup].delivery_partner
        stripped = [lid for lid in route if lid not in (pickup, delivery)]
        for p_pos in range(len(stripped) + 1):
            for d_pos in range(p_pos + 1, len(stripped) + 2):
                candidate = (
                    stripped[:p_pos] + [pickup] + stripped[p_pos:d_pos - 1] + [delivery] + stripped[d_pos - 1:]
                )
                if candidate == route or not _route_ok(inst, candidate):
                    continue
                if _route_distance(inst, candidate) < base:
                    return candidate
    return None


def _route_ok(inst: PdptwInstance, route: list[int]) -> bool:
    load = 0.0
    pos = {lid: k for k, lid in enumerate(route)}
    for lid in route:
        loc = inst.locations[lid]
        if loc.demand < 0 and pos.get(loc.pickup_partner, len(route)) > pos[lid]:
            return False
        load += loc.demand
        if load < 0 or load > inst.capacity:
            return False
    arrivals, back = route_arrivals(inst, tuple(route))
    for lid, t in zip(route, arrivals):
        if t > inst.locations[lid].latest:
            return False
    return back <= inst.depot.latest


def _route_distance(inst: PdptwInstance, route: list[int]) -> float:
    if not route:
        return 0.0
    total = 0.0
    prev = inst.depot
    for lid in route:
        loc = inst.locations[lid]
        total += distance(prev, loc)
        prev = loc
    return total + distance(prev, inst.depot)
