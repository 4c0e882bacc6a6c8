"""Per-problem parsers, verifiers and evaluators.

Each problem registers a :class:`ProblemAdapter`: how to parse an instance
payload, how to parse a candidate's output file, how to verify feasibility
(a list of violation messages, empty means feasible) and how to compute the
objective cost of a feasible solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from ..types import ObjectiveSense, ProblemId

ParseInstanceFn = Callable[[bytes], Any]
ParseSolutionFn = Callable[[Any, str], Any]
VerifyFn = Callable[[Any, Any], list]
EvaluateFn = Callable[[Any, Any], float]


@dataclass(frozen=True)
class ProblemAdapter:
    problem: ProblemId
    sense: ObjectiveSense
    parse_instance: ParseInstanceFn
    parse_solution: ParseSolutionFn
    verify: VerifyFn
    evaluate: EvaluateFn
    solution_suffix: str = ".sol"


_REGISTRY: dict[ProblemId, ProblemAdapter] = {}


def register(adapter: ProblemAdapter) -> ProblemAdapter:
    if adapter.problem in _REGISTRY:
        raise ValueError(f"adapter already registered for {adapter.problem}")
    _REGISTRY[adapter.problem] = adapter
    return adapter


def get_adapter(problem: ProblemId) -> ProblemAdapter:
    _ensure_loaded()
    return _REGISTRY[ProblemId(problem)]


def all_adapters() -> dict[ProblemId, ProblemAdapter]:
    _ensure_loaded()
    return dict(_REGISTRY)


def _ensure_loaded() -> None:
    # Importing the modules runs their register() calls.
    if len(_REGISTRY) == len(ProblemId):
        return
    from . import crew, egraph, iop, mapping, mendelian, pdptw, protein, routing, scheduling  # noqa: F401


__all__ = [
    "ProblemAdapter",
    "register",
    "get_adapter",
    "all_adapters",
]
