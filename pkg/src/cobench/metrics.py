"""Campaign metrics: stage solve rates, per-iteration quality/yield, QYI.

Definitions over a campaign log with N demo instances:

* solve_s@i  — fraction of instances that got strictly past failure stage s
  in some iteration <= i (any sample counts).
* Quality(t) — mean over the instances verified at iteration t of the
  cost ratio against the expert reference (capped at 1 unless uncapped).
* Yield(t)   — verified fraction at iteration t.
* QYI        — harmonic mean of quality and yield; the reported campaign
  score is the best QYI over iterations.
* Weighted QYI — instance-count-weighted mean of per-problem best QYI.

Internally everything is a double; rendered reports print 4 decimals.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

from .log import CampaignLog
from .types import ConfigurationError, ObjectiveSense, ProblemId

SOLVE_ITERATIONS = (1, 5, 10)
STAGE_LABELS = {1: "I", 2: "II", 3: "III"}
UNCAPPED_ZERO_COST_CLAMP = 10.0


@dataclass(frozen=True)
class ReferenceCosts:
    """Expert cost per instance plus the problem's objective sense."""

    sense: ObjectiveSense
    costs: dict[str, float]

    def expert(self, instance_id: str) -> float:
        try:
            return self.costs[instance_id]
        except KeyError:
            raise ConfigurationError(
                f"no reference cost for instance {instance_id!r}"
            ) from None


def cost_ratio(c_star: float, c: float, sense: ObjectiveSense, capped: bool) -> float:
    """Expert-relative solution quality in [0, 1] (capped) or [0, inf) (uncapped)."""
    if sense is ObjectiveSense.MINIMIZE:
        num, den = c_star, c
    else:
        num, den = c, c_star
    if den == 0:
        if num == 0:
            return 1.0
        ratio = UNCAPPED_ZERO_COST_CLAMP
    else:
        ratio = num / den
    ratio = max(0.0, ratio)
    return min(1.0, ratio) if capped else ratio


def qyi(quality: float, yield_: float) -> float:
    """Harmonic mean of quality and yield; 0 when both vanish."""
    if quality + yield_ == 0:
        return 0.0
    return 2.0 * quality * yield_ / (quality + yield_)


def _verified_costs_at(log: CampaignLog, iteration: int) -> dict[str, float]:
    """instance -> best verified cost at the iteration, across samples."""
    from .problems import get_adapter

    sense = get_adapter(log.problem).sense
    pick = min if sense is ObjectiveSense.MINIMIZE else max
    best: dict[str, float] = {}
    for entry in log.entries:
        if entry.iteration != iteration or not entry.outcome.verified:
            continue
        cost = entry.outcome.cost
        assert cost is not None
        if entry.instance_id in best:
            best[entry.instance_id] = pick(best[entry.instance_id], cost)
        else:
            best[entry.instance_id] = cost
    return best


def solve_at(log: CampaignLog, stage: int, i: int) -> float:
    """Fraction of instances past stage `stage` within the first i iterations."""
    if i < 1:
        raise ValueError("iteration budget i must be >= 1")
    if stage not in (1, 2, 3):
        raise ValueError("stage must be 1, 2 or 3")
    instances = log.instance_ids()
    if not instances:
        return 0.0
    passed = {
        entry.instance_id
        for entry in log.entries
        if entry.iteration <= i and entry.outcome.passes_stage(stage)
    }
    return len(passed) / len(instances)


def iteration_yield(log: CampaignLog, iteration: int) -> float:
    instances = log.instance_ids()
    if not instances:
        return 0.0
    return len(_verified_costs_at(log, iteration)) / len(instances)


def iteration_quality(
    log: CampaignLog, iteration: int, refs: ReferenceCosts, capped: bool = True
) -> float:
    verified = _verified_costs_at(log, iteration)
    if not verified:
        return 0.0
    total = 0.0
    for instance_id, cost in verified.items():
        total += cost_ratio(refs.expert(instance_id), cost, refs.sense, capped)
    return total / len(verified)


def iteration_qyi(
    log: CampaignLog, iteration: int, refs: ReferenceCosts, capped: bool = True
) -> float:
    return qyi(iteration_quality(log, iteration, refs, capped), iteration_yield(log, iteration))


def best_qyi(log: CampaignLog, refs: ReferenceCosts, capped: bool = True) -> tuple[float, int]:
    """Highest per-iteration QYI and the iteration achieving it (latest on ties)."""
    iterations = log.iterations()
    if not iterations:
        raise ValueError("campaign log contains no iterations")
    best_value, best_iter = -1.0, iterations[0]
    for t in iterations:
        value = iteration_qyi(log, t, refs, capped)
        if value >= best_value:
            best_value, best_iter = value, t
    return best_value, best_iter


@dataclass(frozen=True)
class IterationMetrics:
    iteration: int
    quality: float
    yield_: float
    qyi: float


@dataclass(frozen=True)
class EvalMetrics:
    instances: int
    quality: float
    yield_: float
    qyi: float


@dataclass(frozen=True)
class MetricsReport:
    problem: ProblemId
    capped: bool
    num_instances: int
    solve: dict[tuple[int, int], float]           # (stage, i) -> fraction
    per_iteration: tuple[IterationMetrics, ...]
    best_qyi: float
    best_iteration: int
    eval: Optional[EvalMetrics] = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.value,
            "capped": self.capped,
            "num_instances": self.num_instances,
            "solve": {
                f"solve_{STAGE_LABELS[s]}@{i}": value
                for (s, i), value in sorted(self.solve.items())
            },
            "per_iteration": [
                {
                    "iteration": m.iteration,
                    "quality": m.quality,
                    "yield": m.yield_,
                    "qyi": m.qyi,
                }
                for m in self.per_iteration
            ],
            "best_qyi": self.best_qyi,
            "best_iteration": self.best_iteration,
            "eval": None
            if self.eval is None
            else {
                "instances": self.eval.instances,
                "quality": self.eval.quality,
                "yield": self.eval.yield_,
                "qyi": self.eval.qyi,
            },
        }


def _eval_metrics(log: CampaignLog, refs: ReferenceCosts, capped: bool) -> Optional[EvalMetrics]:
    if not log.eval_entries:
        return None
    total = len({e.instance_id for e in log.eval_entries})
    verified = {
        e.instance_id: e.outcome.cost for e in log.eval_entries if e.outcome.verified
    }
    y = len(verified) / total if total else 0.0
    if verified:
        q = sum(
            cost_ratio(refs.expert(iid), cost, refs.sense, capped)
            for iid, cost in verified.items()
        ) / len(verified)
    else:
        q = 0.0
    return EvalMetrics(instances=total, quality=q, yield_=y, qyi=qyi(q, y))


def compute_report(
    log: CampaignLog,
    refs: ReferenceCosts,
    capped: bool = True,
    solve_iterations: tuple[int, ...] = SOLVE_ITERATIONS,
) -> MetricsReport:
    solve = {
        (stage, i): solve_at(log, stage, i)
        for stage in (1, 2, 3)
        for i in solve_iterations
    }
    per_iteration = tuple(
        IterationMetrics(
            iteration=t,
            quality=iteration_quality(log, t, refs, capped),
            yield_=iteration_yield(log, t),
            qyi=iteration_qyi(log, t, refs, capped),
        )
        for t in log.iterations()
    )
    value, best_iter = best_qyi(log, refs, capped)
    return MetricsReport(
        problem=log.problem,
        capped=capped,
        num_instances=len(log.instance_ids()),
        solve=solve,
        per_iteration=per_iteration,
        best_qyi=value,
        best_iteration=best_iter,
        eval=_eval_metrics(log, refs, capped),
    )


def weighted_qyi(per_problem: list[tuple[MetricsReport, int]]) -> float:
    """Instance-count-weighted mean of per-problem best QYI values."""
    if not per_problem:
        raise ValueError("weighted QYI needs at least one problem report")
    total_weight = 0
    total = 0.0
    for report, count in per_problem:
        if count <= 0:
            raise ValueError("instance counts must be positive")
        total += count * report.best_qyi
        total_weight += count
    return total / total_weight


# --- rendering ---------------------------------------------------------------


def report_json(report: MetricsReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def report_csv(report: MetricsReport) -> str:
    """Fixed column layout: problem, stage, i, value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["problem", "stage", "i", "value"])
    name = report.problem.value
    for (stage, i), value in sorted(report.solve.items()):
        writer.writerow([name, STAGE_LABELS[stage], i, _fmt(value)])
    for m in report.per_iteration:
        writer.writerow([name, "quality", m.iteration, _fmt(m.quality)])
        writer.writerow([name, "yield", m.iteration, _fmt(m.yield_)])
        writer.writerow([name, "qyi", m.iteration, _fmt(m.qyi)])
    writer.writerow([name, "best_qyi", report.best_iteration, _fmt(report.best_qyi)])
    if report.eval is not None:
        writer.writerow([name, "eval_quality", "", _fmt(report.eval.quality)])
        writer.writerow([name, "eval_yield", "", _fmt(report.eval.yield_)])
        writer.writerow([name, "eval_qyi", "", _fmt(report.eval.qyi)])
    return buf.getvalue()


def aggregate_csv(reports: list[tuple[MetricsReport, int]]) -> str:
    """Concatenated per-problem rows plus the weighted QYI across problems."""
    buf = io.StringIO()
    buf.write("problem,stage,i,value\n")
    for report, _count in reports:
        body = report_csv(report).splitlines()[1:]
        buf.write("\n".join(body) + "\n")
    buf.write(f"ALL,weighted_qyi,,{_fmt(weighted_qyi(reports))}\n")
    return buf.getvalue()
