"""Airline crew pairing: partition flights into legal base-to-base sequences.

Instances are JSON carrying the flight table, crew base airports, legality
rules (minimum connection, maximum span, maximum legs) and cost constants
(fixed charge per pairing, per-minute span rate).  A solution lists one
pairing per line as whitespace-separated flight ids; every flight must be
covered exactly once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register


@dataclass(frozen=True)
class Flight:
    id: str
    dep: str
    arr: str
    dep_min: int
    arr_min: int


@dataclass(frozen=True)
class CrewInstance:
    flights: dict[str, Flight]
    bases: frozenset[str]
    min_connect: int
    max_span: int
    max_legs: int
    fixed_cost: float
    per_minute: float


@dataclass(frozen=True)
class PairingSet:
    pairings: tuple[tuple[str, ...], ...]


def parse_instance(payload: bytes) -> CrewInstance:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    try:
        flights = {}
        for spec in doc["flights"]:
            f = Flight(
                id=str(spec["id"]),
                dep=str(spec["dep"]),
                arr=str(spec["arr"]),
                dep_min=int(spec["dep_min"]),
                arr_min=int(spec["arr_min"]),
            )
            if f.id in flights:
                raise InstanceFormatError(f"duplicate flight id {f.id!r}")
            flights[f.id] = f
        bases = frozenset(str(b) for b in doc["bases"])
        rules = doc["rules"]
        costs = doc["costs"]
        inst = CrewInstance(
            flights=flights,
            bases=bases,
            min_connect=int(rules["min_connect"]),
            max_span=int(rules["max_span"]),
            max_legs=int(rules["max_legs"]),
            fixed_cost=float(costs["fixed"]),
            per_minute=float(costs["per_minute"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed crew instance: {exc}") from exc

    for f in inst.flights.values():
        if f.arr_min <= f.dep_min:
            raise InstanceFormatError(f"flight {f.id!r} must arrive after it departs")
    if inst.min_connect <= 0 or inst.max_span <= 0 or inst.max_legs <= 0:
        raise InstanceFormatError("rule values must be positive")
    if not inst.bases:
        raise InstanceFormatError("no crew bases declared")
    return inst


def parse_solution(inst: CrewInstance, text: str) -> PairingSet:
    pairings = []
    for raw in text.splitlines():
        legs = tuple(raw.split())
        if legs:
            pairings.append(legs)
    if not pairings:
        raise SolutionFormatError("no pairings found")
    return PairingSet(pairings=tuple(pairings))


def pairing_span(inst: CrewInstance, legs: tuple[str, ...]) -> int:
    return inst.flights[legs[-1]].arr_min - inst.flights[legs[0]].dep_min


def verify(inst: CrewInstance, ps: PairingSet) -> list[str]:
    violations: list[str] = []
    seen: dict[str, int] = {}
    unknown = False
    for pairing in ps.pairings:
        for fid in pairing:
            if fid not in inst.flights:
                violations.append(f"unknown flight id {fid!r}")
                unknown = True
            seen[fid] = seen.get(fid, 0) + 1
    for fid in sorted(inst.flights):
        count = seen.get(fid, 0)
        if count == 0:
            violations.append(f"flight {fid!r} is not covered")
        elif count > 1:
            violations.append(f"flight {fid!r} is covered {count} times")
    if unknown:
        return violations

    for idx, pairing in enumerate(ps.pairings, start=1):
        first, last = inst.flights[pairing[0]], inst.flights[pairing[-1]]
        if first.dep not in inst.bases:
            violations.append(f"pairing {idx} starts at non-base airport {first.dep!r}")
        if last.arr not in inst.bases:
            violations.append(f"pairing {idx} ends at non-base airport {last.arr!r}")
        if len(pairing) > inst.max_legs:
            violations.append(f"pairing {idx} has {len(pairing)} legs (limit {inst.max_legs})")
        span = pairing_span(inst, pairing)
        if span > inst.max_span:
            violations.append(f"pairing {idx} spans {span} minutes (limit {inst.max_span})")
        for a_id, b_id in zip(pairing, pairing[1:]):
            a, b = inst.flights[a_id], inst.flights[b_id]
            if a.arr != b.dep:
                violations.append(
                    f"pairing {idx}: {a_id!r} arrives at {a.arr!r} but {b_id!r} departs from {b.dep!r}"
                )
            if b.dep_min < a.arr_min + inst.min_connect:
                violations.append(
                    f"pairing {idx}: connection {a_id!r}->{b_id!r} shorter than "
                    f"{inst.min_connect} minutes"
                )
    return violations


def evaluate(inst: CrewInstance, ps: PairingSet) -> float:
    total = 0.0
    for pairing in ps.pairings:
        total += inst.fixed_cost + inst.per_minute * pairing_span(inst, pairing)
    return total


def format_solution(pairings: list[tuple[str, ...]]) -> str:
    return "".join(" ".join(p) + "\n" for p in pairings)


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.CREW_PAIRING,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
