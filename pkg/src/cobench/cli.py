"""Command-line entry points.

Subcommands: run (a refinement campaign), verify / evaluate (standalone
solution checks), baseline (run a reference solver), refs (build reference
costs), report (aggregate metrics, CSV/JSON plus figures), list (bundled
problems).  Exit codes: 0 success, 1 infeasible or unparseable solution,
2 configuration error, 3 model endpoint failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from . import metrics as metrics_mod
from .baselines import SolverFailure, build_reference_costs, solve_reference
from .campaign import run_campaign
from .llm import EndpointError, HttpChatClient, ModelEndpoint, ReplayClient
from .log import CampaignLog
from .problems import get_adapter
from .suite import ProblemSuite
from .types import (
    CampaignConfig,
    ConfigurationError,
    InstanceFormatError,
    InstanceRef,
    ProblemId,
    SolutionFormatError,
    Split,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_CONFIG = 2
EXIT_ENDPOINT = 3


def _problem(value: str) -> ProblemId:
    try:
        return ProblemId(value)
    except ValueError:
        valid = ", ".join(p.value for p in ProblemId)
        raise argparse.ArgumentTypeError(f"unknown problem {value!r}; valid ids: {valid}")


def _read_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cobench")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a refinement campaign on one problem")
    # --problem/--out may also come from --config, so they are validated after parsing.
    run.add_argument("--problem", type=_problem)
    run.add_argument("--replay", type=Path, help="replay fixture with canned model responses")
    run.add_argument("--model", help="model name for a live endpoint")
    run.add_argument("--base-url", default="https://api.openai.com/v1")
    run.add_argument("--provider", default="openai", choices=["openai", "anthropic"])
    run.add_argument("--api-key-env", default="COBENCH_API_KEY",
                     help="environment variable holding the API key")
    run.add_argument("--iterations", type=int, default=10)
    run.add_argument("--samples", type=int, default=1)
    run.add_argument("--temperature", type=float, default=0.0)
    run.add_argument("--demos", type=int, default=5)
    run.add_argument("--timeout", type=float, default=None,
                     help="per-run wall clock in seconds (default: per-problem)")
    run.add_argument("--cores", type=int, default=8)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", type=Path)
    run.add_argument("--keep-artifacts", action="store_true")
    run.add_argument("--no-plots", action="store_true")
    run.add_argument("--config", type=Path, help="key=value file predefining any flag")

    for name in ("verify", "evaluate"):
        cmd = sub.add_parser(name, help=f"{name} a solution file against an instance")
        cmd.add_argument("--problem", type=_problem, required=True)
        cmd.add_argument("--instance", type=Path, required=True)
        cmd.add_argument("--solution", type=Path, required=True)

    baseline = sub.add_parser("baseline", help="run the reference solver on an instance")
    baseline.add_argument("--problem", type=_problem, required=True)
    baseline.add_argument("--instance", type=Path, required=True)
    baseline.add_argument("--solution-out", type=Path)

    refs = sub.add_parser("refs", help="build reference costs for the bundled suite")
    refs.add_argument("--out", type=Path, help="output directory (default: check against bundled)")

    report = sub.add_parser("report", help="aggregate one or more campaign logs")
    report.add_argument("--log", type=Path, action="append", required=True)
    report.add_argument("--out", type=Path, required=True)
    report.add_argument("--refs", type=Path, help="reference directory (default: bundled)")
    report.add_argument("--uncapped", action="store_true")
    report.add_argument("--no-plots", action="store_true")

    sub.add_parser("list", help="list bundled problems")
    return parser


# --- command implementations ----------------------------------------------------


def _cmd_list() -> int:
    suite = ProblemSuite()
    from .types import DEFAULT_TIMEOUT_S

    print(f"{'problem':<24} {'demo':>4} {'eval':>4} {'timeout_s':>9}")
    for problem in ProblemId:
        demo = len(suite.demo_instances(problem))
        ev = len(suite.eval_instances(problem))
        print(f"{problem.value:<24} {demo:>4} {ev:>4} {DEFAULT_TIMEOUT_S[problem]:>9g}")
    return EXIT_OK


def _load_solution(args) -> tuple:
    adapter = get_adapter(args.problem)
    inst = adapter.parse_instance(Path(args.instance).read_bytes())
    text = Path(args.solution).read_text(encoding="utf-8")
    solution = adapter.parse_solution(inst, text)
    return adapter, inst, solution


def _cmd_verify(args) -> int:
    try:
        adapter, inst, solution = _load_solution(args)
    except SolutionFormatError as exc:
        print(f"solution parse error: {exc}")
        return EXIT_INFEASIBLE
    violations = adapter.verify(inst, solution)
    if not violations:
        print("OK")
        return EXIT_OK
    for v in violations:
        print(v)
    return EXIT_INFEASIBLE


def _cmd_evaluate(args) -> int:
    try:
        adapter, inst, solution = _load_solution(args)
    except SolutionFormatError as exc:
        print(f"solution parse error: {exc}")
        return EXIT_INFEASIBLE
    violations = adapter.verify(inst, solution)
    if violations:
        for v in violations:
            print(v)
        return EXIT_INFEASIBLE
    print(f"{adapter.evaluate(inst, solution):.6f}")
    return EXIT_OK


def _cmd_baseline(args) -> int:
    ref = InstanceRef(
        problem=args.problem,
        instance_id=Path(args.instance).stem,
        split=Split.EVAL,
        payload=Path(args.instance).read_bytes(),
    )
    try:
        sol = solve_reference(ref)
    except SolverFailure as exc:
        print(f"baseline failed: {exc}")
        return EXIT_INFEASIBLE
    if args.solution_out:
        Path(args.solution_out).write_text(sol.payload, encoding="utf-8")
    print(f"{sol.cost:.6f}")
    return EXIT_OK


def _cmd_refs(args) -> int:
    suite = ProblemSuite()
    if args.out is not None:
        build_reference_costs(suite.all_instances(), args.out)
        print(f"references written to {args.out}")
        return EXIT_OK
    with tempfile.TemporaryDirectory() as scratch:
        build_reference_costs(suite.all_instances(), Path(scratch))
        mismatches = _diff_trees(Path(scratch), suite.references_dir())
    if mismatches:
        for m in mismatches:
            print(f"mismatch: {m}")
        return EXIT_CONFIG
    print("bundled references reproduce byte-identically")
    return EXIT_OK


def _diff_trees(fresh: Path, bundled: Path) -> list[str]:
    mismatches = []
    fresh_files = {p.relative_to(fresh) for p in fresh.rglob("*") if p.is_file()}
    bundled_files = {p.relative_to(bundled) for p in bundled.rglob("*") if p.is_file()}
    for rel in sorted(fresh_files | bundled_files):
        a, b = fresh / rel, bundled / rel
        if not a.is_file() or not b.is_file():
            mismatches.append(f"{rel} only on one side")
        elif a.read_bytes() != b.read_bytes():
            mismatches.append(str(rel))
    return mismatches


def _make_client(args):
    if args.replay is not None:
        return ReplayClient.from_file(args.replay), f"replay:{args.replay.name}"
    if args.model:
        endpoint = ModelEndpoint(
            base_url=args.base_url,
            model=args.model,
            provider=args.provider,
            api_key_env=args.api_key_env,
        )
        return HttpChatClient(endpoint), args.model
    raise ConfigurationError("run needs either --replay FILE or --model NAME")


def _cmd_run(args) -> int:
    if args.problem is None:
        raise ConfigurationError("run needs --problem (flag or config file)")
    if args.out is None:
        raise ConfigurationError("run needs --out (flag or config file)")
    client, model_name = _make_client(args)
    config = CampaignConfig(
        problem=args.problem,
        iterations=args.iterations,
        samples_per_iteration=args.samples,
        temperature=args.temperature,
        num_demos=args.demos,
        timeout_s=args.timeout,
        cpu_cores=args.cores,
        model=model_name,
        seed=args.seed,
    )
    suite = ProblemSuite()
    log = run_campaign(
        config, client, suite, workers=args.workers, keep_artifacts=args.keep_artifacts
    )
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    log.save(out / "campaign_log.json")

    if log.entries:
        refs = metrics_mod.ReferenceCosts(
            sense=get_adapter(args.problem).sense, costs=suite.reference_costs(args.problem)
        )
        report = metrics_mod.compute_report(log, refs)
        (out / "metrics.json").write_text(metrics_mod.report_json(report), encoding="utf-8")
        (out / "metrics.csv").write_text(metrics_mod.report_csv(report), encoding="utf-8")
        if not args.no_plots:
            from .plots import render_report_figures

            render_report_figures([(report, report.num_instances)], out)

    if log.aborted:
        print(f"campaign aborted: {log.aborted}", file=sys.stderr)
        print(f"partial log preserved in {out}", file=sys.stderr)
        return EXIT_ENDPOINT
    print(f"campaign complete: best QYI {report.best_qyi:.4f} "
          f"at iteration {report.best_iteration}; outputs in {out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    suite = ProblemSuite()
    refs_dir = args.refs if args.refs is not None else suite.references_dir()
    reports: list[tuple[metrics_mod.MetricsReport, int]] = []
    for log_path in args.log:
        try:
            log = CampaignLog.load(log_path)
        except ValueError as exc:
            print(f"{log_path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        from .baselines import load_reference_costs

        refs = metrics_mod.ReferenceCosts(
            sense=get_adapter(log.problem).sense,
            costs=load_reference_costs(refs_dir, log.problem),
        )
        report = metrics_mod.compute_report(log, refs, capped=not args.uncapped)
        reports.append((report, report.num_instances))

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(metrics_mod.aggregate_csv(reports), encoding="utf-8")
    doc = {
        "reports": [r.to_dict() for r, _ in reports],
        "weighted_qyi": metrics_mod.weighted_qyi(reports),
    }
    (out / "report.json").write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if not args.no_plots:
        from .plots import render_report_figures

        render_report_figures(reports, out)

    print(f"{'problem':<24} {'solve_I@10':>10} {'solve_II@10':>11} {'solve_III@10':>12} {'best_qyi':>9}")
    for report, _ in reports:
        print(
            f"{report.problem.value:<24} "
            f"{report.solve[(1, 10)]:>10.4f} {report.solve[(2, 10)]:>11.4f} "
            f"{report.solve[(3, 10)]:>12.4f} {report.best_qyi:>9.4f}"
        )
    print(f"weighted QYI: {metrics_mod.weighted_qyi(reports):.4f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)

    # A config file may predefine any run flag; explicit flags win.
    if "--config" in argv:
        try:
            cfg_path = Path(argv[argv.index("--config") + 1])
            values = _read_config_file(cfg_path)
        except (IndexError, OSError, ConfigurationError) as exc:
            print(f"bad config file: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for sub_action in parser._subparsers._group_actions:  # type: ignore[union-attr]
            run_parser = sub_action.choices.get("run")
            if run_parser is not None:
                known = {a.dest for a in run_parser._actions}
                defaults = {}
                for key, value in values.items():
                    if key not in known:
                        print(f"bad config file: unknown key {key!r}", file=sys.stderr)
                        return EXIT_CONFIG
                    defaults[key] = value
                run_parser.set_defaults(**_coerce_defaults(run_parser, defaults))

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        if args.command == "list":
            return _cmd_list()
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "baseline":
            return _cmd_baseline(args)
        if args.command == "refs":
            return _cmd_refs(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "report":
            return _cmd_report(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigurationError, InstanceFormatError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EndpointError as exc:
        print(f"endpoint error: {exc}", file=sys.stderr)
        return EXIT_ENDPOINT


def _coerce_defaults(run_parser: argparse.ArgumentParser, values: dict[str, str]) -> dict:
    coerced = {}
    for action in run_parser._actions:
        if action.dest in values:
            raw = values[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                coerced[action.dest] = raw.lower() in ("1", "true", "yes")
            elif action.type is not None:
                coerced[action.dest] = action.type(raw)
            else:
                coerced[action.dest] = raw
    return coerced


if __name__ == "__main__":
    sys.exit(main())
