"""Build and load the expert reference costs the quality metric compares against.

References live in a directory tree, one subdirectory per problem:

    <refs>/<problem>/costs.csv           columns: instance_id, cost, solver, version
    <refs>/<problem>/solutions/<id>.sol  the solution payload, problem output format

Costs are written with full float precision (repr) so a rebuild is
byte-identical and every stored cost re-validates exactly through the
problem's verify + evaluate pair.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from pathlib import Path

from ..problems import get_adapter
from ..types import InstanceRef, ProblemId

SOLVER_VERSION = "1"

_SOLVER_NAMES = {
    ProblemId.OPERATOR_SCHEDULING: "list_scheduler",
    ProblemId.TECHNOLOGY_MAPPING: "priority_cut_mapper",
    ProblemId.GLOBAL_ROUTING: "maze_router",
    ProblemId.EGRAPH_EXTRACTION: "worklist_extractor",
    ProblemId.INTRA_OP_PARALLELISM: "greedy_repair",
    ProblemId.PROTEIN_DESIGN: "mincut_designer",
    ProblemId.MENDELIAN_ERROR: "pedigree_repair",
    ProblemId.CREW_PAIRING: "greedy_continuation",
    ProblemId.PDPTW: "cheapest_insertion",
}


@dataclass(frozen=True)
class ReferenceSolution:
    problem: ProblemId
    instance_id: str
    payload: str
    cost: float
    solver: str
    wall_time_s: float


def _solve_payload(problem: ProblemId, instance_payload: bytes) -> str:
    """Run the problem's reference solver and format its solution text."""
    adapter = get_adapter(problem)
    inst = adapter.parse_instance(instance_payload)

    if problem is ProblemId.OPERATOR_SCHEDULING:
        from ..problems.scheduling import format_solution
        from .eda import baseline_schedule
        return format_solution(baseline_schedule(inst))
    if problem is ProblemId.TECHNOLOGY_MAPPING:
        from ..problems.mapping import format_network
        from .eda import baseline_map
        return format_network(baseline_map(inst))
    if problem is ProblemId.GLOBAL_ROUTING:
        from ..problems.routing import format_solution
        from .eda import baseline_route
        return format_solution(baseline_route(inst))
    if problem is ProblemId.EGRAPH_EXTRACTION:
        from ..problems.egraph import format_solution
        from .compilers import baseline_extract
        return format_solution(baseline_extract(inst))
    if problem is ProblemId.INTRA_OP_PARALLELISM:
        from ..problems.iop import format_solution
        from .compilers import baseline_iop
        return format_solution(baseline_iop(inst))
    if problem is ProblemId.PROTEIN_DESIGN:
        from .bio import baseline_protein
        return baseline_protein(inst) + "\n"
    if problem is ProblemId.MENDELIAN_ERROR:
        from ..problems.mendelian import format_solution
        from .bio import baseline_mendelian
        return format_solution(baseline_mendelian(inst))
    if problem is ProblemId.CREW_PAIRING:
        from ..problems.crew import format_solution
        from .logistics import baseline_pairings
        return format_solution(baseline_pairings(inst))
    if problem is ProblemId.PDPTW:
        from ..problems.pdptw import format_solution
        from .logistics import baseline_pdptw
        return format_solution(list(baseline_pdptw(inst)))
    raise ValueError(f"no reference solver for {problem}")


def solve_reference(ref: InstanceRef) -> ReferenceSolution:
    """Solve one instance and round-trip the payload through verify + evaluate."""
    from . import SolverFailure

    adapter = get_adapter(ref.problem)
    started = time.perf_counter()
    payload = _solve_payload(ref.problem, ref.payload)
    wall = time.perf_counter() - started

    inst = adapter.parse_instance(ref.payload)
    solution = adapter.parse_solution(inst, payload)
    violations = adapter.verify(inst, solution)
    if violations:
        raise SolverFailure(
            f"reference solution for {ref.problem}/{ref.instance_id} is infeasible: {violations[0]}"
        )
    cost = adapter.evaluate(inst, solution)
    return ReferenceSolution(
        problem=ref.problem,
        instance_id=ref.instance_id,
        payload=payload,
        cost=cost,
        solver=_SOLVER_NAMES[ref.problem],
        wall_time_s=wall,
    )


def costs_csv(solutions: list[ReferenceSolution]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance_id", "cost", "solver", "version"])
    for sol in sorted(solutions, key=lambda s: s.instance_id):
        writer.writerow([sol.instance_id, repr(sol.cost), sol.solver, SOLVER_VERSION])
    return buf.getvalue()


def build_reference_costs(instances: list[InstanceRef], out_dir: Path) -> list[ReferenceSolution]:
    """Solve every instance and write the per-problem reference tree under out_dir."""
    from . import SolverFailure

    by_problem: dict[ProblemId, list[ReferenceSolution]] = {}
    for ref in sorted(instances, key=lambda r: (r.problem.value, r.instance_id)):
        try:
            sol = solve_reference(ref)
        except SolverFailure as exc:
            raise SolverFailure(f"{ref.problem}/{ref.instance_id}: {exc}") from exc
        by_problem.setdefault(ref.problem, []).append(sol)

    out_dir = Path(out_dir)
    for problem, sols in by_problem.items():
        pdir = out_dir / problem.value
        (pdir / "solutions").mkdir(parents=True, exist_ok=True)
        (pdir / "costs.csv").write_text(costs_csv(sols), encoding="utf-8")
        suffix = get_adapter(problem).solution_suffix
        for sol in sols:
            (pdir / "solutions" / f"{sol.instance_id}{suffix}").write_text(
                sol.payload, encoding="utf-8"
            )
    return [sol for sols in by_problem.values() for sol in sols]


def load_reference_costs(refs_dir: Path, problem: ProblemId) -> dict[str, float]:
    path = Path(refs_dir) / problem.value / "costs.csv"
    costs: dict[str, float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            costs[row["instance_id"]] = float(row["cost"])
    return costs
