"""Mendelian error detection: repair observed genotypes in a pedigree.

Instances are JSON: an allele count ``alleles`` (m) and ``individuals``
with ids, parent ids (0 = unknown/founder) and an observed genotype, an
unordered allele pair or null.  A solution assigns every individual a pair,
written as ``id allele allele`` lines.  Feasibility requires every child's
pair to take one allele from the father's assigned pair and one from the
mother's; the cost (minimized) is the number of individuals whose assigned
pair differs from their observation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register

Pair = tuple[int, int]  # unordered, stored sorted


def as_pair(a: int, b: int) -> Pair:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Individual:
    id: int
    father: int   # 0 when unknown
    mother: int
    genotype: Pair | None


@dataclass(frozen=True)
class Pedigree:
    alleles: int
    individuals: tuple[Individual, ...]

    def by_id(self) -> dict[int, Individual]:
        return {ind.id: ind for ind in self.individuals}


@dataclass(frozen=True)
class GenotypeAssignment:
    pairs: dict[int, Pair]
    duplicates: tuple[int, ...] = ()


def parse_instance(payload: bytes) -> Pedigree:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    try:
        alleles = int(doc["alleles"])
        individuals = []
        for spec in doc["individuals"]:
            geno = spec.get("genotype")
            pair = as_pair(int(geno[0]), int(geno[1])) if geno is not None else None
            individuals.append(
                Individual(
                    id=int(spec["id"]),
                    father=int(spec.get("father", 0)),
                    mother=int(spec.get("mother", 0)),
                    genotype=pair,
                )
            )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed pedigree: {exc}") from exc

    if alleles < 1:
        raise InstanceFormatError("allele count must be >= 1")
    ids = [ind.id for ind in individuals]
    if len(set(ids)) != len(ids):
        raise InstanceFormatError("duplicate individual ids")
    id_set = set(ids)
    for ind in individuals:
        for parent in (ind.father, ind.mother):
            if parent != 0 and parent not in id_set:
                raise InstanceFormatError(f"individual {ind.id} references unknown parent {parent}")
        if ind.genotype is not None:
            a, b = ind.genotype
            if not (1 <= a <= alleles and 1 <= b <= alleles):
                raise InstanceFormatError(f"individual {ind.id} observed alleles out of range")
    ped = Pedigree(alleles=alleles, individuals=tuple(individuals))
    if _has_ancestor_cycle(ped):
        raise InstanceFormatError("pedigree contains an ancestry cycle")
    return ped


def _has_ancestor_cycle(ped: Pedigree) -> bool:
    by_id = ped.by_id()
    state: dict[int, int] = {}

    def visit(i: int) -> bool:
        if state.get(i) == 1:
            return True
        if state.get(i) == 2:
            return False
        state[i] = 1
        ind = by_id[i]
        for parent in (ind.father, ind.mother):
            if parent != 0 and visit(parent):
                return True
        state[i] = 2
        return False

    return any(visit(ind.id) for ind in ped.individuals)


def parse_solution(ped: Pedigree, text: str) -> GenotypeAssignment:
    pairs: dict[int, Pair] = {}
    duplicates: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise SolutionFormatError(f"line {lineno}: expected 'id allele allele', got {line!r}")
        try:
            ind_id, a, b = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise SolutionFormatError(f"line {lineno}: values must be integers") from exc
        if ind_id in pairs:
            duplicates.append(ind_id)
        pairs[ind_id] = as_pair(a, b)
    if not pairs:
        raise SolutionFormatError("no genotype assignments found")
    return GenotypeAssignment(pairs=pairs, duplicates=tuple(duplicates))


def _inherits(child: Pair, father: Pair | None, mother: Pair | None) -> bool:
    """One allele from each known parent, in either order."""
    a, b = child
    for p, q in ((a, b), (b, a)):
        ok_f = father is None or p in father
        ok_m = mother is None or q in mother
        if ok_f and ok_m:
            return True
    return False


def verify(ped: Pedigree, assignment: GenotypeAssignment) -> list[str]:
    violations: list[str] = []
    known = {ind.id for ind in ped.individuals}
    for ind_id in assignment.duplicates:
        violations.append(f"individual {ind_id} assigned more than once")
    for ind_id, (a, b) in sorted(assignment.pairs.items()):
        if ind_id not in known:
            violations.append(f"assignment names unknown individual {ind_id}")
        elif not (1 <= a <= ped.alleles and 1 <= b <= ped.alleles):
            violations.append(f"individual {ind_id}: allele out of range in ({a}, {b})")
    for ind in ped.individuals:
        if ind.id not in assignment.pairs:
            violations.append(f"individual {ind.id} has no assigned genotype")
    if violations:
        return violations

    for ind in ped.individuals:
        father = assignment.pairs[ind.father] if ind.father != 0 else None
        mother = assignment.pairs[ind.mother] if ind.mother != 0 else None
        if father is None and mother is None:
            continue
        if not _inherits(assignment.pairs[ind.id], father, mother):
            violations.append(
                f"individual {ind.id}: pair {assignment.pairs[ind.id]} cannot be inherited "
                f"from father {father} and mother {mother}"
            )
    return violations


def evaluate(ped: Pedigree, assignment: GenotypeAssignment) -> float:
    corrections = 0
    for ind in ped.individuals:
        if ind.genotype is not None and assignment.pairs[ind.id] != ind.genotype:
            corrections += 1
    return float(corrections)


def format_solution(pairs: dict[int, Pair]) -> str:
    return "".join(f"{i} {p[0]} {p[1]}\n" for i, p in sorted(pairs.items()))


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.MENDELIAN_ERROR,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
