"""Protein sequence design over the hydrophobic/polar alphabet.

An instance fixes a target structure digest: n residues, weighted contacts
(i, j, w) rewarding hydrophobic pairs, per-residue exposure penalties a_i
and a scalar beta.  A solution is a length-n string over {H, P} and its
fitness (maximized) is

    phi(s) = sum_{(i,j)} w_ij * h_i * h_j  -  beta * sum_i a_i * h_i

with h_i = 1 for H and 0 for P.  All parameters live in the instance file;
the evaluator has no hidden constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register


@dataclass(frozen=True)
class GcInstance:
    n: int
    contacts: tuple[tuple[int, int, float], ...]
    exposure: tuple[float, ...]
    beta: float


def parse_instance(payload: bytes) -> GcInstance:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    try:
        n = int(doc["n"])
        contacts = tuple((int(c[0]), int(c[1]), float(c[2])) for c in doc["contacts"])
        exposure = tuple(float(a) for a in doc["exposure"])
        beta = float(doc["beta"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed design instance: {exc}") from exc

    if n < 1:
        raise InstanceFormatError("n must be >= 1")
    if len(exposure) != n:
        raise InstanceFormatError("exposure list length must equal n")
    if beta < 0 or not math.isfinite(beta):
        raise InstanceFormatError("beta must be finite and >= 0")
    for i, j, w in contacts:
        if not 0 <= i < j < n:
            raise InstanceFormatError(f"contact ({i}, {j}) must satisfy 0 <= i < j < n")
        if w < 0 or not math.isfinite(w):
            raise InstanceFormatError(f"contact ({i}, {j}) has invalid weight {w}")
    for a in exposure:
        if a < 0 or not math.isfinite(a):
            raise InstanceFormatError(f"invalid exposure penalty {a}")
    return GcInstance(n=n, contacts=contacts, exposure=exposure, beta=beta)


def parse_solution(inst: GcInstance, text: str) -> str:
    for raw in text.splitlines():
        line = raw.strip()
        if line:
            return line
    raise SolutionFormatError("no sequence found in output")


def verify(inst: GcInstance, seq: str) -> list[str]:
    violations: list[str] = []
    if len(seq) != inst.n:
        violations.append(f"sequence length {len(seq)} differs from n = {inst.n}")
    bad = sorted(set(seq) - {"H", "P"})
    if bad:
        violations.append(f"sequence uses characters outside H/P: {bad}")
    return violations


def evaluate(inst: GcInstance, seq: str) -> float:
    h = [1 if ch == "H" else 0 for ch in seq]
    phi = 0.0
    for i, j, w in inst.contacts:
        phi += w * h[i] * h[j]
    penalty = 0.0
    for i, a in enumerate(inst.exposure):
        penalty += a * h[i]
    return phi - inst.beta * penalty


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.PROTEIN_DESIGN,
        sense=ObjectiveSense.MAXIMIZE,
        parse_instance=parse_instance,
        parse_solution=parse_solution,
        verify=verify,
        evaluate=evaluate,
    )
)
