"""Campaign log: the append-only record a campaign leaves behind.

Serialized as a single versioned JSON document (``schema: 1``) with the
config snapshot, every (instance, iteration, sample) outcome, the verbatim
prompt transcripts, the held-out evaluation records and the identity of the
selected program.  Serialization is canonical (sorted keys, fixed
indentation) so identical campaigns produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .types import LogEntry, ProblemId

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CampaignLog:
    problem: ProblemId
    config: dict
    entries: tuple[LogEntry, ...]
    transcripts: tuple[dict, ...] = ()
    eval_entries: tuple[LogEntry, ...] = ()
    selected: dict | None = None          # {"iteration": t, "sample_index": j}
    aborted: str | None = None
    schema: int = SCHEMA_VERSION

    def iterations(self) -> list[int]:
        return sorted({e.iteration for e in self.entries})

    def instance_ids(self) -> list[str]:
        return sorted({e.instance_id for e in self.entries})

    def samples_per_iteration(self) -> int:
        return int(self.config.get("samples_per_iteration", 1))

    def entries_at(self, iteration: int, sample_index: int | None = None) -> list[LogEntry]:
        return [
            e
            for e in self.entries
            if e.iteration == iteration
            and (sample_index is None or e.sample_index == sample_index)
        ]

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "problem": self.problem.value,
            "config": self.config,
            "entries": [e.to_dict() for e in self.entries],
            "transcripts": list(self.transcripts),
            "eval_entries": [e.to_dict() for e in self.eval_entries],
            "selected": self.selected,
            "aborted": self.aborted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @staticmethod
    def from_dict(doc: dict) -> "CampaignLog":
        schema = doc.get("schema")
        if schema != SCHEMA_VERSION:
            raise ValueError(f"unsupported campaign log schema: {schema!r}")
        return CampaignLog(
            problem=ProblemId(doc["problem"]),
            config=doc["config"],
            entries=tuple(LogEntry.from_dict(e) for e in doc["entries"]),
            transcripts=tuple(doc.get("transcripts", [])),
            eval_entries=tuple(LogEntry.from_dict(e) for e in doc.get("eval_entries", [])),
            selected=doc.get("selected"),
            aborted=doc.get("aborted"),
            schema=schema,
        )

    @staticmethod
    def load(path: Path) -> "CampaignLog":
        return CampaignLog.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class LogBuilder:
    """Mutable accumulator used while a campaign runs."""

    problem: ProblemId
    config: dict
    entries: list[LogEntry] = field(default_factory=list)
    transcripts: list[dict] = field(default_factory=list)
    eval_entries: list[LogEntry] = field(default_factory=list)
    selected: dict | None = None
    aborted: str | None = None

    def freeze(self) -> CampaignLog:
        ordered = sorted(
            self.entries, key=lambda e: (e.iteration, e.sample_index, e.instance_id)
        )
        eval_ordered = sorted(self.eval_entries, key=lambda e: e.instance_id)
        return CampaignLog(
            problem=self.problem,
            config=self.config,
            entries=tuple(ordered),
            transcripts=tuple(self.transcripts),
            eval_entries=tuple(eval_ordered),
            selected=self.selected,
            aborted=self.aborted,
        )
