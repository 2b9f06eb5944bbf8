# -*- coding: utf-8 -*-
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from src.cluster.model import ClusterState, Credential, CredentialLevel
from src.cluster.session import Session
from src.common.exceptions import ConfigurationError
from src.common.utils.logger import get_logger, timed
from src.common.utils.models import DomainModel
from src.engine.engine import apply_action
from src.engine.results import ActionStatus
from src.policy.model import PolicySet
from src.scenarios.goals import goals_hold
from src.scenarios.model import (
    GOAL_NOT_SATISFIED,
    OutcomeKind,
    Prerequisite,
    Scenario,
    ScenarioOutcome,
    ScenarioVerdict,
    TraceEntry,
)

_logger = get_logger(__name__)

_OUTCOMES = {
    ActionStatus.BLOCKED_POLICY.value: OutcomeKind.BLOCKED,
    ActionStatus.DENIED_RBAC.value: OutcomeKind.DENIED,
    ActionStatus.FAILED_PRECONDITION.value: OutcomeKind.FAILED,
}


class ScenarioExecution(DomainModel):
    verdict: ScenarioVerdict
    state: ClusterState
    session: Session


def resolve_credential(state: ClusterState, subject: str) -> Credential:
    """
    Finds the credential a subject is declared with in the fixture.

    Raises:
        ConfigurationError: No user, service account, CI user, deploy or node credential has this subject.
    """
    candidates = list(state.users)
    candidates.extend(
        Credential(subject=sa.principal, level=CredentialLevel.SERVICE_ACCOUNT) for sa in state.service_accounts
    )
    if state.ci_server is not None:
        candidates.extend(u.credential for u in state.ci_server.users)
        candidates.extend(state.ci_server.deploy_credentials)
    candidates.extend(c for _, c in sorted(state.node_credentials.items()))
    credential = next((c for c in candidates if c.subject == subject), None)
    if credential is None:
        raise ConfigurationError(f"prerequisite credential {subject} is not declared in the fixture")
    return credential


def start_session(state: ClusterState, prerequisite: Prerequisite) -> Session:
    credential = resolve_credential(state, prerequisite.subject)
    session = Session.start(credential, prerequisite.location)
    if prerequisite.open_shell is not None:
        session = session.copy(update={"open_shell": prerequisite.open_shell})
    return session


def execute_scenario(
    fixture: ClusterState, scenario: Scenario, policy: Optional[PolicySet] = None
) -> ScenarioExecution:
    """
    Runs a scenario's steps in order and judges the result.

    The first step that is not Applied ends the run and decides the outcome. When every step applies,
    the goals are evaluated once on the final state.

    Args:
        fixture (ClusterState): Start world; never modified.
        scenario (Scenario): The attack.
        policy (Optional[PolicySet]): Active mitigations.

    Returns:
        ScenarioExecution: The verdict plus the final state and session.
    """
    state = fixture
    session = start_session(fixture, scenario.prerequisite)
    trace: List[TraceEntry] = []
    outcome: Optional[ScenarioOutcome] = None

    for index, action in enumerate(scenario.steps):
        state, result = apply_action(state, session, action, policy)
        trace.append(TraceEntry(action=action, result=result))
        if not result.applied:
            outcome = ScenarioOutcome(
                kind=_OUTCOMES[result.status], step_index=index, policy_id=result.policy_id, reason=result.reason
            )
            break
        assert result.session is not None
        session = result.session

    if outcome is None:
        if goals_hold(scenario.goal, state, session, trace, scenario.prerequisite.subject):
            outcome = ScenarioOutcome.achieved()
        else:
            outcome = ScenarioOutcome(kind=OutcomeKind.FAILED, reason=GOAL_NOT_SATISFIED)

    verdict = ScenarioVerdict(scenario_id=scenario.id, outcome=outcome, trace=trace)
    _logger.info(f"{scenario.id}: {verdict.outcome}")
    return ScenarioExecution(verdict=verdict, state=state, session=session)


def run_scenario(fixture: ClusterState, scenario: Scenario, policy: Optional[PolicySet] = None) -> ScenarioVerdict:
    return execute_scenario(fixture, scenario, policy).verdict


@timed
def run_batch(
    fixture: ClusterState,
    scenarios: List[Scenario],
    policy: Optional[PolicySet] = None,
    parallel: bool = False,
    max_workers: int = 4,
) -> List[ScenarioVerdict]:
    """
    Runs independent scenarios, each against its own copy of the fixture.

    Args:
        fixture (ClusterState): Start world shared by every scenario.
        scenarios (List[Scenario]): Scenarios to run.
        policy (Optional[PolicySet]): Active mitigations.
        parallel (bool): Run on a thread pool instead of sequentially.
        max_workers (int): Pool size when `parallel` is set.

    Returns:
        List[ScenarioVerdict]: Verdicts in input order.
    """
    copies = [fixture.copy(deep=True) for _ in scenarios]
    if not parallel:
        return [run_scenario(copy, scenario, policy) for copy, scenario in zip(copies, scenarios)]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(lambda pair: run_scenario(pair[0], pair[1], policy), zip(copies, scenarios)))
