"""Access to the bundled problem suite: instances, descriptions, references."""

from __future__ import annotations

from pathlib import Path

from .types import ConfigurationError, InstanceRef, ProblemId, Split

DATA_DIR = Path(__file__).with_name("data")


class ProblemSuite:
    """Instance files, problem descriptions and reference costs on disk.

    The default root is the data tree shipped inside the package; tests and
    power users may point at an alternative tree with the same layout.
    """

    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root is not None else DATA_DIR

    # -- instances ---------------------------------------------------------

    def instances(self, problem: ProblemId, split: Split) -> list[InstanceRef]:
        split_dir = self.root / "instances" / problem.value / split.value
        if not split_dir.is_dir():
            raise ConfigurationError(f"no bundled {split} instances for {problem}")
        refs = []
        for path in sorted(split_dir.iterdir()):
            if path.is_file():
                refs.append(
                    InstanceRef(
                        problem=problem,
                        instance_id=path.stem,
                        split=split,
                        payload=path.read_bytes(),
                    )
                )
        return refs

    def demo_instances(self, problem: ProblemId) -> list[InstanceRef]:
        return self.instances(problem, Split.DEMO)

    def eval_instances(self, problem: ProblemId) -> list[InstanceRef]:
        return self.instances(problem, Split.EVAL)

    def all_instances(self) -> list[InstanceRef]:
        refs = []
        for problem in ProblemId:
            refs.extend(self.demo_instances(problem))
            refs.extend(self.eval_instances(problem))
        return refs

    # -- documents ----------------------------------------------------------

    def description(self, problem: ProblemId) -> str:
        path = self.root / "descriptions" / f"{problem.value}.md"
        if not path.is_file():
            raise ConfigurationError(f"missing problem description document for {problem}")
        return path.read_text(encoding="utf-8")

    # -- reference costs ------------------------------------------------------

    def references_dir(self) -> Path:
        return self.root / "references"

    def reference_costs(self, problem: ProblemId) -> dict[str, float]:
        from .baselines import load_reference_costs

        path = self.references_dir() / problem.value / "costs.csv"
        if not path.is_file():
            raise ConfigurationError(f"missing reference costs for {problem}")
        return load_reference_costs(self.references_dir(), problem)

    # -- fixtures --------------------------------------------------------------

    def replay_fixture(self, name: str) -> Path:
        return self.root / "replay" / name
