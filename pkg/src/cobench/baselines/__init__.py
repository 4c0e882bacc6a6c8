"""Expert reference solvers and the brute-force oracles used in tests.

The reference tier is "good heuristic", deliberately not published
state-of-the-art tooling; quality scores computed against these references
are relative to this repository's baselines.
"""

from __future__ import annotations


class SolverFailure(Exception):
    """A reference solver could not produce a feasible solution."""


from .refs import (  # noqa: E402  (SolverFailure must exist before refs imports solvers)
    ReferenceSolution,
    build_reference_costs,
    load_reference_costs,
    solve_reference,
)

__all__ = [
    "SolverFailure",
    "ReferenceSolution",
    "build_reference_costs",
    "load_reference_costs",
    "solve_reference",
]
