# -*- coding: utf-8 -*-
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Set

from src.cluster.model import ClusterState
from src.common.exceptions import ConfigurationError


class CapabilityKind(str, Enum):
    DEPLOY_IN_NAMESPACE = "DeployInNamespace"
    JENKINS_EDIT_ACCESS = "JenkinsEditAccess"
    INGRESS_CREATE_ON = "IngressCreateOn"
    CRUD_IN = "CrudIn"
    IN_CLUSTER_NETWORK = "InClusterNetwork"
    SHELL_IN_POD = "ShellInPod"
    NODE_ROOT = "NodeRoot"
    CLUSTER_ADMIN = "ClusterAdmin"
    TOPIC_READ = "TopicRead"
    BACKDOORED_IMAGE = "BackdooredImage"
    EXTERNAL_EXPOSURE = "ExternalExposure"
    CROSS_NAMESPACE_DELETE = "CrossNamespaceDelete"


CAPABILITY_KINDS = [kind.value for kind in CapabilityKind]

PARAMETERIZED_KINDS = frozenset(
    kind.value
    for kind in (
        CapabilityKind.DEPLOY_IN_NAMESPACE,
        CapabilityKind.INGRESS_CREATE_ON,
        CapabilityKind.CRUD_IN,
        CapabilityKind.SHELL_IN_POD,
        CapabilityKind.NODE_ROOT,
        CapabilityKind.TOPIC_READ,
        CapabilityKind.BACKDOORED_IMAGE,
        CapabilityKind.EXTERNAL_EXPOSURE,
    )
)

_PATTERN = re.compile(r"^\s*(?P<kind>[A-Za-z]+)\s*(?:\(\s*(?P<arg>[^()]*?)\s*\))?\s*$")


@dataclass(frozen=True, order=True)
class Capability:
    """An attacker ability; `arg` names the namespace, service (`namespace/name`), node, topic or job it is bound to."""

    kind: str
    arg: str = ""

    def __str__(self) -> str:
        return f"{self.kind}({self.arg})" if self.arg else self.kind

    @classmethod
    def of(cls, kind: CapabilityKind, arg: str = "") -> "Capability":
        return cls(kind=kind.value, arg=arg)


def parse_capability(text: str) -> Capability:
    """
    Parses `Kind` or `Kind(arg)`.

    Raises:
        ConfigurationError: Unknown kind, or an argument missing or superfluous for the kind.
    """
    match = _PATTERN.match(text)
    kind = match.group("kind") if match else None
    if kind not in CAPABILITY_KINDS:
        raise ConfigurationError(f"unknown capability '{text}'; valid capabilities: {', '.join(CAPABILITY_KINDS)}")
    assert match is not None
    arg = match.group("arg") or ""
    if kind in PARAMETERIZED_KINDS and not arg:
        raise ConfigurationError(f"capability {kind} needs an argument, e.g. {kind}(name)")
    if kind not in PARAMETERIZED_KINDS and arg:
        raise ConfigurationError(f"capability {kind} takes no argument")
    return Capability(kind=kind, arg=arg)


def _bindable(state: ClusterState) -> Dict[str, Set[str]]:
    namespaces = set(state.namespace_names())
    services = {service.ref for service in state.services}
    return {
        CapabilityKind.DEPLOY_IN_NAMESPACE.value: namespaces,
        CapabilityKind.CRUD_IN.value: namespaces,
        CapabilityKind.SHELL_IN_POD.value: namespaces,
        CapabilityKind.INGRESS_CREATE_ON.value: services,
        CapabilityKind.EXTERNAL_EXPOSURE.value: services,
        CapabilityKind.NODE_ROOT.value: {node.name for node in state.nodes},
        CapabilityKind.TOPIC_READ.value: {topic for broker in state.brokers for topic in broker.topics},
        CapabilityKind.BACKDOORED_IMAGE.value: set(state.ci_server.jobs) if state.ci_server is not None else set(),
    }


def check_capability(capability: Capability, state: ClusterState) -> Capability:
    """
    Checks that a parameterized capability names an entity of `state`.

    Raises:
        ConfigurationError: The argument names no namespace, service, node, topic or job of the fixture.
    """
    known = _bindable(state).get(capability.kind)
    if known is not None and capability.arg not in known:
        listed = ", ".join(sorted(known)) or "none"
        raise ConfigurationError(f"capability {capability} names nothing in the fixture; known: {listed}")
    return capability
