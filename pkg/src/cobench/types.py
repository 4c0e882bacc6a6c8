"""Shared domain types for the benchmark harness."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class ProblemId(str, enum.Enum):
    """Closed enumeration of the bundled problem suite."""

    OPERATOR_SCHEDULING = "operator_scheduling"
    TECHNOLOGY_MAPPING = "technology_mapping"
    GLOBAL_ROUTING = "global_routing"
    EGRAPH_EXTRACTION = "egraph_extraction"
    INTRA_OP_PARALLELISM = "intra_op_parallelism"
    PROTEIN_DESIGN = "protein_design"
    MENDELIAN_ERROR = "mendelian_error"
    CREW_PAIRING = "crew_pairing"
    PDPTW = "pdptw"

    def __str__(self) -> str:  # argparse/log friendliness
        return self.value


class ObjectiveSense(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"

    def __str__(self) -> str:
        return self.value


class Split(str, enum.Enum):
    DEMO = "demo"
    EVAL = "eval"

    def __str__(self) -> str:
        return self.value


class StageTag(str, enum.Enum):
    FAIL_I = "Fail_I"
    FAIL_II = "Fail_II"
    FAIL_III = "Fail_III"
    VERIFIED = "Verified"

    def __str__(self) -> str:
        return self.value


#: Error buckets recorded alongside failures.
ERROR_CATEGORIES = ("hallucinated_api", "logic", "constraint", "timeout", "other")


class ConfigurationError(Exception):
    """Bad harness configuration (missing data, invalid flag combination)."""


class PreconditionError(Exception):
    """An operation was invoked before its inputs were ready."""


class HarnessError(Exception):
    """Infrastructure failure not attributable to a candidate program."""


class InstanceFormatError(Exception):
    """A benchmark instance payload does not match its documented schema."""


class SolutionFormatError(Exception):
    """A candidate's output file does not parse as the problem's solution format."""


class ExtractionError(Exception):
    """No usable program could be extracted from a model response."""

    def __init__(self, message: str, iteration: int, sample_index: int):
        super().__init__(message)
        self.iteration = iteration
        self.sample_index = sample_index


@dataclass(frozen=True)
class InstanceRef:
    """One benchmark input; the unit over which metrics count instances."""

    problem: ProblemId
    instance_id: str
    split: Split
    payload: bytes

    def payload_text(self) -> str:
        return self.payload.decode("utf-8")


@dataclass(frozen=True)
class CandidateProgram:
    """Source text of one generated solver.

    The entry point must be a function named ``solve`` taking an input path
    and an output path.
    """

    source: str
    iteration: int
    sample_index: int = 0

    def __post_init__(self):
        if not self.source.strip():
            raise ValueError("candidate program source is empty")
        if self.iteration < 1:
            raise ValueError("iteration must be >= 1")
        if self.sample_index < 0:
            raise ValueError("sample_index must be >= 0")


@dataclass(frozen=True)
class StageOutcome:
    """Per-run classification: one of three failure stages, or verified with a cost."""

    tag: StageTag
    detail: str = ""
    cost: Optional[float] = None
    error_category: Optional[str] = None

    def __post_init__(self):
        if (self.cost is not None) != (self.tag is StageTag.VERIFIED):
            raise ValueError("cost must be present exactly when the outcome is Verified")
        if self.tag is StageTag.FAIL_III and not self.detail:
            raise ValueError("Fail_III must carry at least one violation message")
        if self.error_category is not None and self.error_category not in ERROR_CATEGORIES:
            raise ValueError(f"unknown error category: {self.error_category}")

    @property
    def verified(self) -> bool:
        return self.tag is StageTag.VERIFIED

    def passes_stage(self, stage: int) -> bool:
        """True when this outcome got strictly past failure stage `stage` (1..3)."""
        order = {
            StageTag.FAIL_I: 0,
            StageTag.FAIL_II: 1,
            StageTag.FAIL_III: 2,
            StageTag.VERIFIED: 3,
        }
        if stage not in (1, 2, 3):
            raise ValueError("stage must be 1, 2 or 3")
        return order[self.tag] >= stage

    def to_dict(self) -> dict:
        return {
            "tag": self.tag.value,
            "detail": self.detail,
            "cost": self.cost,
            "error_category": self.error_category,
        }

    @staticmethod
    def from_dict(d: dict) -> "StageOutcome":
        return StageOutcome(
            tag=StageTag(d["tag"]),
            detail=d.get("detail", ""),
            cost=d.get("cost"),
            error_category=d.get("error_category"),
        )


@dataclass(frozen=True)
class CampaignConfig:
    """Knobs for one refinement campaign on a single problem."""

    problem: ProblemId
    iterations: int = 10
    samples_per_iteration: int = 1
    temperature: float = 0.0
    num_demos: int = 5
    timeout_s: Optional[float] = None  # None -> per-problem default
    cpu_cores: int = 8
    model: str = "replay"
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.samples_per_iteration < 1:
            raise ConfigurationError("samples_per_iteration must be >= 1")
        if not 0.0 <= self.temperature <= 1.0:
            raise ConfigurationError("temperature must lie in [0, 1]")
        if self.num_demos < 0:
            raise ConfigurationError("num_demos must be >= 0")
        if self.timeout_s is not None and self.timeout_s <= 0:
            raise ConfigurationError("timeout_s must be positive")
        if self.cpu_cores < 1:
            raise ConfigurationError("cpu_cores must be >= 1")

    def resolved_timeout_s(self) -> float:
        if self.timeout_s is not None:
            return float(self.timeout_s)
        return DEFAULT_TIMEOUT_S[self.problem]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.value,
            "iterations": self.iterations,
            "samples_per_iteration": self.samples_per_iteration,
            "temperature": self.temperature,
            "num_demos": self.num_demos,
            "timeout_s": self.resolved_timeout_s(),
            "cpu_cores": self.cpu_cores,
            "model": self.model,
            "seed": self.seed,
        }


#: Wall-clock budget, in seconds, granted to a candidate on one instance.
DEFAULT_TIMEOUT_S: dict[ProblemId, float] = {
    ProblemId.OPERATOR_SCHEDULING: 10.0,
    ProblemId.TECHNOLOGY_MAPPING: 10.0,
    ProblemId.GLOBAL_ROUTING: 300.0,
    ProblemId.EGRAPH_EXTRACTION: 10.0,
    ProblemId.INTRA_OP_PARALLELISM: 60.0,
    ProblemId.PROTEIN_DESIGN: 10.0,
    ProblemId.MENDELIAN_ERROR: 10.0,
    ProblemId.CREW_PAIRING: 10.0,
    ProblemId.PDPTW: 60.0,
}


@dataclass(frozen=True)
class FormatCheck:
    """Result of parsing a candidate's output file."""

    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class VerifyResult:
    """Verifier violations plus, when feasible, the evaluator's cost."""

    violations: tuple[str, ...] = ()
    cost: Optional[float] = None


@dataclass(frozen=True)
class LogEntry:
    """One (instance, iteration, sample) record of a campaign."""

    instance_id: str
    iteration: int
    sample_index: int
    outcome: StageOutcome
    evidence_digest: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "iteration": self.iteration,
            "sample_index": self.sample_index,
            "outcome": self.outcome.to_dict(),
            "evidence_digest": self.evidence_digest,
        }

    @staticmethod
    def from_dict(d: dict) -> "LogEntry":
        return LogEntry(
            instance_id=d["instance_id"],
            iteration=d["iteration"],
            sample_index=d["sample_index"],
            outcome=StageOutcome.from_dict(d["outcome"]),
            evidence_digest=d.get("evidence_digest", {}),
        )
