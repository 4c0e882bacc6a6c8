"""cobench: an agentic evaluation harness for heuristic combinatorial optimization."""

from .types import (
    CampaignConfig,
    CandidateProgram,
    InstanceRef,
    ObjectiveSense,
    ProblemId,
    Split,
    StageOutcome,
    StageTag,
)

__version__ = "0.1.0"

__all__ = [
    "CampaignConfig",
    "CandidateProgram",
    "InstanceRef",
    "ObjectiveSense",
    "ProblemId",
    "Split",
    "StageOutcome",
    "StageTag",
    "__version__",
]
