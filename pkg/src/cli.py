# -*- coding: utf-8 -*-
import argparse
import sys
from logging import DEBUG
from pathlib import Path
from typing import List, Optional

from src.analyzer.capabilities import CAPABILITY_KINDS, check_capability, parse_capability
from src.analyzer.closure import analyze
from src.analyzer.oracle import OracleComparison, compare_with_simulator
from src.analyzer.rules import ANONYMOUS
from src.cluster.fixture import load_fixture
from src.common.exceptions import SimulatorError, UnsupportedScenarioError
from src.common.settings.base import Settings
from src.common.utils.logger import get_logger, set_log_level
from src.policy.loader import load_policy_file
from src.policy.model import PolicySet
from src.report.report import (
    build_analysis_report,
    build_run_report,
    build_threat_report,
    render_analysis_text,
    render_run_text,
    render_threats_text,
    render_trace_text,
)
from src.scenarios.builtins import builtin_scenarios
from src.scenarios.loader import load_scenario_file
from src.scenarios.model import Scenario, ScenarioVerdict
from src.scenarios.runner import resolve_credential, run_batch

_logger = get_logger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2

EXPECT_ACHIEVED = "achieved"
EXPECT_BLOCKED = "blocked"
FORMAT_TEXT = "text"
FORMAT_JSON = "json"


def _add_common(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument(
        "--fixture", type=Path, default=settings.paths.fixture, help="cluster fixture (default: canonical)"
    )
    parser.add_argument("--format", choices=[FORMAT_TEXT, FORMAT_JSON], default=FORMAT_TEXT, help="report format")
    parser.add_argument("--out", type=Path, help="write the report here instead of standard output")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging and per-step traces")


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sscs-sim",
        description="Simulate privilege-escalation attacks against a software supply chain running on Kubernetes.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run scenarios and compare them with the escalation analyzer")
    _add_common(run, settings)
    run.add_argument("--scenario", type=Path, action="append", default=[], help="scenario file (repeatable)")
    run.add_argument("--builtin", action="store_true", help="run the four built-in scenarios")
    run.add_argument("--policy", type=Path, help="mitigation policy file (default: none)")
    run.add_argument("--expect", choices=[EXPECT_ACHIEVED, EXPECT_BLOCKED], help="required outcome of every scenario")
    run.add_argument("--parallel", action="store_true", help="run scenarios on a thread pool")

    analyze_cmd = commands.add_parser("analyze", help="compute reachable capabilities from an initial set")
    _add_common(analyze_cmd, settings)
    analyze_cmd.add_argument("--policy", type=Path, help="mitigation policy file (default: none)")
    analyze_cmd.add_argument(
        "--capability",
        action="append",
        default=[],
        help=f"initial capability, e.g. CrudIn(developer) (repeatable); kinds: {', '.join(CAPABILITY_KINDS)}",
    )
    analyze_cmd.add_argument(
        "--as", dest="principal", help="principal the policy is evaluated for (default: anonymous user)"
    )

    threats = commands.add_parser("threat-model", help="list threats of the fixture's components")
    _add_common(threats, settings)

    builtins = commands.add_parser("list-builtins", help="describe the built-in scenarios")
    builtins.add_argument("--format", choices=[FORMAT_TEXT, FORMAT_JSON], default=FORMAT_TEXT, help="output format")
    builtins.add_argument("--out", type=Path, help="write the listing here instead of standard output")
    builtins.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    _logger.info(f"Report written to {out}")


def _load_policy(path: Optional[Path]) -> PolicySet:
    return load_policy_file(path) if path is not None else PolicySet()


def _expectation_mismatches(verdicts: List[ScenarioVerdict], expect: Optional[str]) -> List[str]:
    if expect is None:
        return []
    wanted = (lambda v: v.achieved) if expect == EXPECT_ACHIEVED else (lambda v: v.blocked)
    return [f"{v.scenario_id}: expected {expect}, got {v.outcome}" for v in verdicts if not wanted(v)]


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    if not args.scenario and not args.builtin:
        raise SimulatorError("nothing to run: pass --scenario and/or --builtin")
    fixture = load_fixture(args.fixture)
    policy = _load_policy(args.policy)
    scenarios: List[Scenario] = builtin_scenarios() if args.builtin else []
    scenarios.extend(load_scenario_file(path) for path in args.scenario)

    verdicts = run_batch(fixture, scenarios, policy, parallel=args.parallel, max_workers=settings.runner.max_workers)
    analyses: List[OracleComparison] = []
    for scenario in scenarios:
        try:
            analyses.append(compare_with_simulator(fixture, scenario, policy))
        except UnsupportedScenarioError as e:
            _logger.warning(f"{scenario.id}: no analyzer prediction ({e})")

    report = build_run_report(fixture, policy, scenarios, verdicts, analyses)
    if args.format == FORMAT_JSON:
        text = report.json(indent=2) + "\n"
    else:
        text = render_run_text(report)
        if args.verbose:
            text += "\n" + "\n".join(render_trace_text(v) for v in verdicts)
    _emit(text, args.out)

    mismatches = _expectation_mismatches(verdicts, args.expect)
    for mismatch in mismatches:
        print(mismatch, file=sys.stderr)
    return EXIT_MISMATCH if mismatches else EXIT_OK


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> int:
    fixture = load_fixture(args.fixture)
    initial = [check_capability(parse_capability(text), fixture) for text in args.capability]
    policy = _load_policy(args.policy)
    principal = resolve_credential(fixture, args.principal) if args.principal else ANONYMOUS

    graph = analyze(fixture, initial, policy=policy, principal=principal)
    report = build_analysis_report(fixture, policy, principal.subject, graph)
    text = report.json(indent=2) + "\n" if args.format == FORMAT_JSON else render_analysis_text(report)
    _emit(text, args.out)
    return EXIT_OK


def cmd_threat_model(args: argparse.Namespace, settings: Settings) -> int:
    report = build_threat_report(load_fixture(args.fixture))
    text = report.json(indent=2) + "\n" if args.format == FORMAT_JSON else render_threats_text(report)
    _emit(text, args.out)
    return EXIT_OK


def cmd_list_builtins(args: argparse.Namespace, settings: Settings) -> int:
    scenarios = builtin_scenarios()
    if args.format == FORMAT_JSON:
        text = "[\n" + ",\n".join(s.json(indent=2) for s in scenarios) + "\n]\n"
    else:
        lines = [f"{'Id':<11} {'Title':<54} {'Prerequisite':<44} Goals", f"{'-' * 11} {'-' * 54} {'-' * 44} {'-' * 5}"]
        for scenario in scenarios:
            goals = ", ".join(goal.kind for goal in scenario.goal)
            lines.append(f"{scenario.id:<11} {scenario.title:<54} {scenario.prerequisite.subject:<44} {goals}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "analyze": cmd_analyze,
    "threat-model": cmd_threat_model,
    "list-builtins": cmd_list_builtins,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the `sscs-sim` command.

    Returns:
        int: 0 on success, 1 when a scenario misses its `--expect`ed outcome, 2 on input or usage errors.
    """
    settings = Settings()
    args = build_parser(settings).parse_args(argv)
    set_log_level(DEBUG if args.verbose else settings.logging.level)
    try:
        return _COMMANDS[args.command](args, settings)
    except SimulatorError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
