"""Figure rendering for reports.

Writes PNG files next to the delimited report output: per problem a
stage-solve bar chart and a per-iteration quality/yield/QYI curve, plus a
cross-problem best-QYI chart when several logs are reported together.
Rendering is file-only (Agg backend); no display is ever opened.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import STAGE_LABELS, MetricsReport, weighted_qyi  # noqa: E402

_FIGSIZE = (6.4, 3.6)
_DPI = 150


def render_solve_figure(report: MetricsReport, path: Path) -> Path:
    stages = sorted({s for s, _ in report.solve})
    budgets = sorted({i for _, i in report.solve})
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    width = 0.8 / max(1, len(budgets))
    for k, i in enumerate(budgets):
        xs = [s + (k - (len(budgets) - 1) / 2) * width for s in stages]
        ys = [report.solve[(s, i)] for s in stages]
        ax.bar(xs, ys, width=width, label=f"@{i}")
    ax.set_xticks(stages)
    ax.set_xticklabels([f"stage {STAGE_LABELS[s]}" for s in stages])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("solve fraction")
    ax.set_title(f"{report.problem.value}: stage solve rates")
    ax.legend(title="iterations")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_iteration_figure(report: MetricsReport, path: Path) -> Path:
    iterations = [m.iteration for m in report.per_iteration]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(iterations, [m.quality for m in report.per_iteration], marker="o", label="quality")
    ax.plot(iterations, [m.yield_ for m in report.per_iteration], marker="s", label="yield")
    ax.plot(iterations, [m.qyi for m in report.per_iteration], marker="^", label="QYI")
    ax.axvline(report.best_iteration, color="grey", linestyle=":", linewidth=1)
    ax.set_xlabel("iteration")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(iterations)
    ax.set_title(f"{report.problem.value}: refinement trajectory")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_summary_figure(reports: list[tuple[MetricsReport, int]], path: Path) -> Path:
    names = [r.problem.value for r, _ in reports]
    values = [r.best_qyi for r, _ in reports]
    fig, ax = plt.subplots(figsize=(max(6.4, 1.1 * len(names)), 3.6))
    ax.bar(range(len(names)), values, color="tab:blue")
    overall = weighted_qyi(reports)
    ax.axhline(overall, color="tab:red", linestyle="--", linewidth=1,
               label=f"weighted QYI = {overall:.4f}")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("best QYI")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_report_figures(
    reports: list[tuple[MetricsReport, int]], out_dir: Path
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for report, _count in reports:
        name = report.problem.value
        written.append(render_solve_figure(report, out_dir / f"{name}_solve.png"))
        written.append(render_iteration_figure(report, out_dir / f"{name}_iterations.png"))
    if len(reports) > 1:
        written.append(render_summary_figure(reports, out_dir / "summary_qyi.png"))
    return written
