# -*- coding: utf-8 -*-
from typing import List, Optional

from src.analyzer.closure import EscalationGraph
from src.analyzer.oracle import OracleComparison
from src.cluster.model import ClusterState
from src.common.utils.models import DomainModel
from src.common.utils.serialization import canonical_digest
from src.policy.model import PolicySet
from src.report.threats import ThreatEntry, relevant_threats, threat_model
from src.scenarios.model import Scenario, ScenarioVerdict


class RunReport(DomainModel):
    fixture_digest: str
    policy_digest: str
    policy_rules: List[str] = []
    verdicts: List[ScenarioVerdict] = []
    analyses: List[OracleComparison] = []
    threats: List[ThreatEntry] = []

    @property
    def all_agree(self) -> bool:
        return all(analysis.agrees for analysis in self.analyses)


class Gain(DomainModel):
    capability: str
    witness: List[str]


class AnalysisReport(DomainModel):
    fixture_digest: str
    policy_digest: str
    principal: str
    initial: List[str] = []
    reached: List[str] = []
    gains: List[Gain] = []


class ThreatReport(DomainModel):
    fixture_digest: str
    threats: List[ThreatEntry] = []


def fixture_digest(fixture: ClusterState) -> str:
    return canonical_digest(fixture.to_document())


def policy_digest(policy: PolicySet) -> str:
    return canonical_digest(policy.to_document())


def build_run_report(
    fixture: ClusterState,
    policy: PolicySet,
    scenarios: List[Scenario],
    verdicts: List[ScenarioVerdict],
    analyses: List[OracleComparison],
) -> RunReport:
    """
    Assembles the outcome of a batch run.

    Args:
        fixture (ClusterState): The start world every scenario ran against.
        policy (PolicySet): The active mitigations.
        scenarios (List[Scenario]): Scenarios in run order.
        verdicts (List[ScenarioVerdict]): One verdict per scenario, same order.
        analyses (List[OracleComparison]): Analyzer predictions for the capability-mappable scenarios.

    Returns:
        RunReport: Digests, verdicts, predictions and the threat rows touched by achieved goals.
    """
    achieved = [
        goal.kind for scenario, verdict in zip(scenarios, verdicts) if verdict.achieved for goal in scenario.goal
    ]
    return RunReport(
        fixture_digest=fixture_digest(fixture),
        policy_digest=policy_digest(policy),
        policy_rules=policy.rule_ids,
        verdicts=verdicts,
        analyses=analyses,
        threats=relevant_threats(fixture, achieved),
    )


def build_analysis_report(
    fixture: ClusterState, policy: PolicySet, principal: str, graph: EscalationGraph
) -> AnalysisReport:
    return AnalysisReport(
        fixture_digest=fixture_digest(fixture),
        policy_digest=policy_digest(policy),
        principal=principal,
        initial=[str(c) for c in sorted(graph.initial)],
        reached=[str(c) for c in sorted(graph.reached)],
        gains=[Gain(capability=str(c), witness=graph.witness(c)) for c in graph.gains],
    )


def build_threat_report(fixture: ClusterState) -> ThreatReport:
    return ThreatReport(fixture_digest=fixture_digest(fixture), threats=threat_model(fixture))


def _agreement(analysis: Optional[OracleComparison]) -> str:
    if analysis is None:
        return "n/a"
    return "yes" if analysis.agrees else "NO"


def render_run_text(report: RunReport) -> str:
    lines = [
        f"fixture {report.fixture_digest}",
        f"policy  {report.policy_digest} [{', '.join(report.policy_rules) or 'baseline'}]",
        "",
        f"{'Scenario':<14} {'Outcome':<52} {'Steps':>5}  {'Analyzer':<9}",
        f"{'-' * 14} {'-' * 52} {'-' * 5}  {'-' * 9}",
    ]
    analyses = {a.scenario_id: a for a in report.analyses}
    for verdict in report.verdicts:
        outcome = str(verdict.outcome)
        lines.append(
            f"{verdict.scenario_id:<14} {outcome:<52} {len(verdict.trace):>5}  "
            f"{_agreement(analyses.get(verdict.scenario_id)):<9}"
        )
    if report.threats:
        lines.extend(["", "Threats touched by achieved goals:", _threat_table(report.threats)])
    return "\n".join(lines) + "\n"


def render_trace_text(verdict: ScenarioVerdict) -> str:
    lines = [f"{verdict.scenario_id}: {verdict.outcome}"]
    for index, entry in enumerate(verdict.trace):
        detail = entry.result.reason or entry.result.policy_id or ""
        lines.append(f"  {index:>2} {entry.action.kind:<20} {entry.result.status:<18} {detail}".rstrip())
    return "\n".join(lines) + "\n"


def render_analysis_text(report: AnalysisReport) -> str:
    lines = [
        f"fixture   {report.fixture_digest}",
        f"policy    {report.policy_digest}",
        f"principal {report.principal}",
        f"initial   {', '.join(report.initial) or '(none)'}",
        "",
    ]
    if not report.gains:
        lines.append("No capabilities reachable beyond the initial set.")
        return "\n".join(lines) + "\n"
    lines.append(f"{'Capability':<40} Witness")
    lines.append(f"{'-' * 40} {'-' * 7}")
    for gain in report.gains:
        lines.append(f"{gain.capability:<40} {' -> '.join(gain.witness)}")
    return "\n".join(lines) + "\n"


def _threat_table(threats: List[ThreatEntry]) -> str:
    lines = [
        f"{'System':<11} {'Potential Flaw':<21} {'Threat':<44} Mitigation",
        f"{'-' * 11} {'-' * 21} {'-' * 44} {'-' * 10}",
    ]
    for entry in threats:
        lines.append(
            f"{entry.system:<11} {entry.potential_flaw:<21} {entry.threat_description:<44} {entry.mitigation}"
        )
    return "\n".join(lines)


def render_threats_text(report: ThreatReport) -> str:
    return f"fixture {report.fixture_digest}\n\n{_threat_table(report.threats)}\n"
