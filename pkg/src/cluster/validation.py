# -*- coding: utf-8 -*-
from collections import Counter
from typing import Iterable, List, Tuple

from src.cluster.model import ClusterState, CredentialLevel, in_node_port_range


def _duplicates(keys: Iterable[Tuple[str, ...]]) -> List[Tuple[str, ...]]:
    return sorted(key for key, count in Counter(keys).items() if count > 1)


def invariant_violations(state: ClusterState) -> List[str]:
    """
    Lists every broken structural invariant of `state`; an empty list means the state is valid.

    Args:
        state (ClusterState): The state to check.

    Returns:
        List[str]: Human-readable violations in a stable order.
    """
    violations: List[str] = []
    namespaces = set(state.namespace_names())
    nodes = {n.name for n in state.nodes}

    for key in _duplicates(("node", n.name) for n in state.nodes):
        violations.append(f"duplicate {key[0]} {key[1]}")
    for key in _duplicates(("namespace", n.name) for n in state.namespaces):
        violations.append(f"duplicate {key[0]} {key[1]}")
    for key in _duplicates(("pod", p.namespace, p.name) for p in state.pods):
        violations.append(f"duplicate pod {key[1]}/{key[2]}")
    for key in _duplicates(("service", s.namespace, s.name) for s in state.services):
        violations.append(f"duplicate service {key[1]}/{key[2]}")
    for key in _duplicates(("serviceaccount", a.namespace, a.name) for a in state.service_accounts):
        violations.append(f"duplicate service account {key[1]}/{key[2]}")
    for key in _duplicates(("image", i.name, i.tag) for i in state.registry.images):
        violations.append(f"duplicate image {key[1]}:{key[2]}")

    for account in state.service_accounts:
        if account.namespace not in namespaces:
            violations.append(f"service account {account.principal} references unknown namespace")

    for pod in state.pods:
        if pod.namespace not in namespaces:
            violations.append(f"pod {pod.ref} references unknown namespace")
        if pod.node not in nodes:
            violations.append(f"pod {pod.ref} references unknown node {pod.node}")
        if state.service_account(pod.service_account, pod.namespace) is None:
            violations.append(f"pod {pod.ref} references unknown service account {pod.service_account}")
        if state.registry.get(pod.image) is None:
            violations.append(f"pod {pod.ref} references image {pod.image} missing from the registry")
        for volume in pod.volumes:
            if volume.is_host_path and not (volume.host_directory or "").startswith("/"):
                violations.append(f"pod {pod.ref} has a hostPath volume without an absolute host directory")

    for service in state.services:
        if service.namespace not in namespaces:
            violations.append(f"service {service.ref} references unknown namespace")
        if service.node_port is not None and not in_node_port_range(service.node_port):
            violations.append(f"service {service.ref} nodePort {service.node_port} outside 30000-32767")
    for ip in sorted(ip for ip, count in Counter(s.cluster_ip for s in state.services).items() if count > 1):
        violations.append(f"clusterIP {ip} assigned to more than one service")
    node_ports = [s.node_port for s in state.services if s.node_port is not None]
    for port in sorted(port for port, count in Counter(node_ports).items() if count > 1):
        violations.append(f"nodePort {port} assigned to more than one service")

    for node in state.nodes:
        if len(node.kubeconfig_paths()) != 1:
            violations.append(f"node {node.name} must hold exactly one kubeconfig")
        credential = state.node_credentials.get(node.name)
        if credential is None or credential.level != CredentialLevel.CLUSTER_ADMIN:
            violations.append(f"node {node.name} kubeconfig must map to a clusterAdmin credential")
        expected = sorted(p.ref for p in state.pods if p.node == node.name)
        if sorted(node.running_containers) != expected:
            violations.append(f"node {node.name} running containers out of sync with scheduled pods")

    for broker in state.brokers:
        if state.service(broker.service.name, broker.service.namespace) is None:
            violations.append(f"broker service {broker.service.ref} does not exist")

    if state.ci_server is not None:
        for name, job in sorted(state.ci_server.jobs.items()):
            if state.source_repo is None or job.source_ref != state.source_repo.name:
                violations.append(f"job {name} references unknown source repository {job.source_ref}")

    return violations
