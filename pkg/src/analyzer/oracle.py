# -*- coding: utf-8 -*-
from typing import Dict, FrozenSet, List, Optional, Set

from src.analyzer.capabilities import Capability, CapabilityKind
from src.analyzer.closure import EscalationGraph, analyze
from src.analyzer.rules import Footprint, build_rules
from src.cluster.model import ClusterState, ResourceKind, Verb
from src.cluster.rbac import authorize
from src.cluster.session import LocationKind, Session, ShellKind
from src.common.exceptions import UnsupportedScenarioError
from src.common.utils.models import DomainModel
from src.engine.actions import target_key
from src.policy.model import PolicySet
from src.scenarios.model import (
    AnyGoal,
    ClusterAdminObtained,
    CrossNamespacePodDeleted,
    ExternallyReachable,
    PayloadRouteServed,
    Scenario,
    TopicDataRead,
)
from src.scenarios.runner import run_scenario, start_session

_CRUD_VERBS = (Verb.CREATE, Verb.GET, Verb.UPDATE, Verb.DELETE)


def initial_capabilities(state: ClusterState, session: Session) -> FrozenSet[Capability]:
    """
    Maps a concrete session onto the capabilities it starts with.

    Args:
        state (ClusterState): The fixture whose RBAC rules are consulted.
        session (Session): The attacker's starting session.

    Returns:
        FrozenSet[Capability]: Grants, network position and shells expressed as capabilities.
    """
    capabilities: Set[Capability] = set()
    credential = session.credential
    if credential.is_cluster_admin:
        capabilities.add(Capability.of(CapabilityKind.CLUSTER_ADMIN))
    if state.ci_server is not None and state.ci_server.is_user(credential):
        capabilities.add(Capability.of(CapabilityKind.JENKINS_EDIT_ACCESS))

    for namespace in state.namespace_names():

        def can(verb: Verb, kind: ResourceKind) -> bool:
            return authorize(state, session, verb, kind, namespace)

        if can(Verb.CREATE, ResourceKind.POD) and can(Verb.CREATE, ResourceKind.SERVICE):
            capabilities.add(Capability.of(CapabilityKind.DEPLOY_IN_NAMESPACE, namespace))
        if all(can(verb, ResourceKind.POD) for verb in _CRUD_VERBS):
            capabilities.add(Capability.of(CapabilityKind.CRUD_IN, namespace))
        if can(Verb.UPDATE, ResourceKind.SERVICE):
            services = [s for s in state.services if s.namespace == namespace]
            capabilities.update(Capability.of(CapabilityKind.INGRESS_CREATE_ON, s.ref) for s in services)

    location = session.location
    if location.kind == LocationKind.IN_CLUSTER:
        capabilities.add(Capability.of(CapabilityKind.IN_CLUSTER_NETWORK))
    if location.kind == LocationKind.ON_NODE and location.node:
        capabilities.add(Capability.of(CapabilityKind.NODE_ROOT, location.node))
    shell = session.open_shell
    if shell is not None and shell.kind == ShellKind.POD and shell.namespace:
        capabilities.add(Capability.of(CapabilityKind.SHELL_IN_POD, shell.namespace))
    if shell is not None and shell.kind == ShellKind.NODE:
        capabilities.add(Capability.of(CapabilityKind.NODE_ROOT, shell.name))
    return frozenset(capabilities)


def goal_capabilities(state: ClusterState, goal: AnyGoal) -> FrozenSet[Capability]:
    """
    Capabilities any one of which satisfies `goal`.

    Raises:
        UnsupportedScenarioError: The goal has no capability counterpart.
    """
    if isinstance(goal, TopicDataRead):
        return frozenset({Capability.of(CapabilityKind.TOPIC_READ, goal.topic)})
    if isinstance(goal, PayloadRouteServed):
        jobs = sorted(state.ci_server.jobs) if state.ci_server is not None else []
        return frozenset(Capability.of(CapabilityKind.BACKDOORED_IMAGE, job) for job in jobs)
    if isinstance(goal, ExternallyReachable):
        return frozenset({Capability.of(CapabilityKind.EXTERNAL_EXPOSURE, f"{goal.namespace}/{goal.service}")})
    if isinstance(goal, ClusterAdminObtained):
        return frozenset({Capability.of(CapabilityKind.CLUSTER_ADMIN)})
    if isinstance(goal, CrossNamespacePodDeleted):
        return frozenset({Capability.of(CapabilityKind.CROSS_NAMESPACE_DELETE)})
    raise UnsupportedScenarioError(f"goal {goal.kind} has no capability mapping")


def scenario_footprint(scenario: Scenario) -> FrozenSet[Footprint]:
    return frozenset((step.kind, target_key(step)) for step in scenario.steps)


class OracleComparison(DomainModel):
    scenario_id: str
    simulated: bool
    predicted: bool
    gains: List[str] = []
    witnesses: Dict[str, List[str]] = {}

    @property
    def agrees(self) -> bool:
        return self.simulated == self.predicted


def scenario_graph(fixture: ClusterState, scenario: Scenario, policy: Optional[PolicySet] = None) -> EscalationGraph:
    """The closure from the scenario's prerequisite, using only rules whose actions the scenario performs."""
    session = start_session(fixture, scenario.prerequisite)
    steps = scenario_footprint(scenario)
    rules = [rule for rule in build_rules(fixture) if rule.within(steps)]
    return analyze(
        fixture, initial_capabilities(fixture, session), policy=policy, principal=session.credential, rules=rules
    )


def compare_with_simulator(
    fixture: ClusterState, scenario: Scenario, policy: Optional[PolicySet] = None
) -> OracleComparison:
    goals = [goal_capabilities(fixture, goal) for goal in scenario.goal]
    graph = scenario_graph(fixture, scenario, policy)
    predicted = all(any(graph.reachable(c) for c in alternatives) for alternatives in goals)
    simulated = run_scenario(fixture, scenario, policy).achieved
    return OracleComparison(
        scenario_id=scenario.id,
        simulated=simulated,
        predicted=predicted,
        gains=[str(c) for c in graph.gains],
        witnesses={str(c): graph.witness(c) for c in graph.gains},
    )


def agrees_with_simulator(fixture: ClusterState, scenario: Scenario, policy: Optional[PolicySet] = None) -> bool:
    """
    Checks that the analyzer and the simulator agree on whether a scenario reaches its goal.

    Raises:
        UnsupportedScenarioError: A goal of the scenario has no capability counterpart.
    """
    return compare_with_simulator(fixture, scenario, policy).agrees
