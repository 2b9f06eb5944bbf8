# -*- coding: utf-8 -*-
from enum import Enum
from typing import Dict, Iterable, List

from src.cluster.model import ClusterState
from src.common.utils.models import DomainModel
from src.scenarios.model import GoalKind


class Component(str, Enum):
    GIT = "Git"
    JENKINS = "Jenkins"
    DOCKER = "Docker"
    K8S = "K8s"
    STRIMZI = "Strimzi"
    CUSTOM_APP = "Custom App"


class ThreatEntry(DomainModel):
    system: Component
    potential_flaw: str
    threat_description: str
    mitigation: str


THREAT_TABLE: List[ThreatEntry] = [
    ThreatEntry(
        system=Component.GIT,
        potential_flaw="Account Compromise",
        threat_description="Potential privileged account compromise",
        mitigation="Enable 2 factor auth",
    ),
    ThreatEntry(
        system=Component.JENKINS,
        potential_flaw="Control over CI/CD",
        threat_description="Account can be used to alter build configs",
        mitigation="Enable 2 factor auth",
    ),
    ThreatEntry(
        system=Component.DOCKER,
        potential_flaw="Docker Pull",
        threat_description="Potential infected container",
        mitigation="Implement vuln scanning for containers",
    ),
    ThreatEntry(
        system=Component.K8S,
        potential_flaw="DDOS",
        threat_description="Front end apps externally exposed",
        mitigation="Proper security checks (ex. check in place to prevent multiple auth)",
    ),
    ThreatEntry(
        system=Component.STRIMZI,
        potential_flaw="Network Policy",
        threat_description="Default pods can access listeners",
        mitigation="Configure proper network policy",
    ),
    ThreatEntry(
        system=Component.CUSTOM_APP,
        potential_flaw="Non sanitized fields",
        threat_description="Potential for malicious input",
        mitigation="Patch to allow sanitized",
    ),
]

GOAL_COMPONENTS: Dict[str, List[Component]] = {
    GoalKind.TOPIC_DATA_READ.value: [Component.STRIMZI, Component.CUSTOM_APP],
    GoalKind.PAYLOAD_ROUTE_SERVED.value: [Component.JENKINS, Component.DOCKER, Component.GIT],
    GoalKind.EXTERNALLY_REACHABLE.value: [Component.K8S, Component.STRIMZI],
    GoalKind.CLUSTER_ADMIN_OBTAINED.value: [Component.K8S, Component.DOCKER],
    GoalKind.CROSS_NAMESPACE_POD_DELETED.value: [Component.K8S, Component.DOCKER],
}


def present_components(state: ClusterState) -> List[Component]:
    """Component kinds the fixture contains; several brokers still count as one Strimzi component."""
    present = {
        Component.GIT: state.source_repo is not None,
        Component.JENKINS: state.ci_server is not None,
        Component.DOCKER: bool(state.registry.images),
        Component.K8S: bool(state.nodes),
        Component.STRIMZI: bool(state.brokers),
        Component.CUSTOM_APP: any(i.relay or i.build_number is not None for i in state.registry.images),
    }
    return [component for component in Component if present[component]]


def threat_model(state: ClusterState) -> List[ThreatEntry]:
    components = {component.value for component in present_components(state)}
    return [entry for entry in THREAT_TABLE if entry.system in components]


def relevant_threats(state: ClusterState, achieved_goal_kinds: Iterable[str]) -> List[ThreatEntry]:
    """Threat rows of present components touched by at least one achieved goal, in table order."""
    touched = {component.value for kind in achieved_goal_kinds for component in GOAL_COMPONENTS.get(kind, [])}
    return [entry for entry in threat_model(state) if entry.system in touched]
