# -*- coding: utf-8 -*-
from random import Random
from typing import Dict, List

import pytest

from src.analyzer.oracle import agrees_with_simulator, compare_with_simulator, scenario_graph
from src.cluster.model import ClusterState
from src.common.exceptions import UnsupportedScenarioError
from src.engine.actions import KubectlApply, ProduceTopic, ServiceManifest
from src.policy.model import PolicySet
from src.scenarios.builtins import broker_exposure, builtin_scenarios, namespace_breakout, topic_siphon
from src.scenarios.model import Scenario, TopicDataWritten
from tests.factories import random_policy, random_supply_chain

pytestmark = pytest.mark.integration

BLOCKING_RULE = {
    "scenario-1": "NamespaceScopedServiceAccounts",
    "scenario-2": "JenkinsBuildEditRestriction",
    "scenario-3": "IngressObjectRestriction",
    "scenario-4": "HostPathRestriction",
}
POLICY_NAMES: List[str] = ["baseline", *BLOCKING_RULE.values()]


def _policy(name: str, mitigations: Dict[str, PolicySet]) -> PolicySet:
    return PolicySet() if name == "baseline" else mitigations[name]


@pytest.mark.parametrize("scenario", builtin_scenarios(), ids=lambda s: s.id)
@pytest.mark.parametrize("policy_name", POLICY_NAMES)
def test_analyzer_agrees_on_the_builtins(
    canonical: ClusterState, mitigations: Dict[str, PolicySet], scenario: Scenario, policy_name: str
) -> None:
    comparison = compare_with_simulator(canonical, scenario, _policy(policy_name, mitigations))

    assert comparison.agrees
    assert comparison.simulated == (policy_name != BLOCKING_RULE[scenario.id])


def test_analyzer_agrees_on_random_supply_chains() -> None:
    rng = Random(42)
    for _ in range(200):
        state = random_supply_chain(rng)
        policy = random_policy(rng)
        for scenario in builtin_scenarios():
            assert agrees_with_simulator(state, scenario, policy), (scenario.id, policy.json(), state.json())


@pytest.mark.parametrize("policy_name", ["baseline", "IngressObjectRestriction"])
def test_reapplied_service_does_not_bypass_add_node_port(
    canonical: ClusterState, mitigations: Dict[str, PolicySet], policy_name: str
) -> None:
    exposure = broker_exposure()
    reapply = KubectlApply(
        manifest=ServiceManifest(
            name="strimzi-service", namespace="kafka", selector={"app": "strimzi_app"}, port=9092, node_port=30500
        )
    )
    scenario = exposure.copy(update={"steps": [exposure.steps[0], reapply, exposure.steps[-1]]})

    comparison = compare_with_simulator(canonical, scenario, _policy(policy_name, mitigations))

    assert comparison.agrees
    assert not comparison.simulated


def test_breakout_witness_names_the_node_it_escaped_to(canonical: ClusterState) -> None:
    comparison = compare_with_simulator(canonical, namespace_breakout())

    assert comparison.witnesses["ClusterAdmin"] == [
        "exec-shell[developer]",
        "hostpath-escape[developer:k8s-master]",
        "node-kubeconfig[k8s-master]",
    ]
    assert "CrossNamespaceDelete" in comparison.gains


def test_scenario_graph_only_uses_rules_the_steps_perform(canonical: ClusterState) -> None:
    graph = scenario_graph(canonical, topic_siphon())

    assert [str(c) for c in graph.gains] == ["InClusterNetwork", "TopicRead(audit-log)", "TopicRead(orders)"]


def test_topic_writes_are_outside_the_analyzer(canonical: ClusterState) -> None:
    siphon = topic_siphon()
    produce = ProduceTopic(service="strimzi-service", namespace="kafka", topic="orders", record="x")
    scenario = siphon.copy(update={"steps": [*siphon.steps[:-1], produce], "goal": [TopicDataWritten(topic="orders")]})

    with pytest.raises(UnsupportedScenarioError):
        agrees_with_simulator(canonical, scenario)
