# -*- coding: utf-8 -*-
from pathlib import Path
from typing import Optional

from src.cluster.model import DEFAULT_SERVICE_ACCOUNT, ClusterState, Exposure, ServiceAccount
from src.cluster.validation import invariant_violations
from src.common.exceptions import ConfigurationError
from src.common.utils.documents import dump_yaml, parse_model, parse_yaml, read_text
from src.common.utils.logger import get_logger

_logger = get_logger(__name__)


def normalize(state: ClusterState) -> ClusterState:
    """Adds each namespace's implicit `default` service account and derives node container lists from pods."""
    normalized = state.copy(deep=True)
    for namespace in normalized.namespace_names():
        if normalized.service_account(DEFAULT_SERVICE_ACCOUNT, namespace) is None:
            normalized.service_accounts.append(ServiceAccount(name=DEFAULT_SERVICE_ACCOUNT, namespace=namespace))
    for node in normalized.nodes:
        node.running_containers = sorted(p.ref for p in normalized.pods if p.node == node.name)
    return normalized


def check_fixture(state: ClusterState, source: Optional[str] = None) -> ClusterState:
    """
    Validates a freshly loaded world.

    Args:
        state (ClusterState): The parsed fixture.
        source (Optional[str]): Name used in error messages.

    Returns:
        ClusterState: The normalized state.

    Raises:
        ConfigurationError: An invariant is broken or a broker is exposed at load time.
    """
    normalized = normalize(state)
    violations = invariant_violations(normalized)
    for broker in normalized.brokers:
        service = normalized.service(broker.service.name, broker.service.namespace)
        if service is not None and service.exposure != Exposure.INTERNAL_ONLY:
            violations.append(f"broker service {broker.service.ref} must be internalOnly at initialization")
    if violations:
        raise ConfigurationError(f"{source or 'fixture'}: " + "; ".join(violations))
    return normalized


def load_fixture_text(text: str, source: Optional[str] = None) -> ClusterState:
    data, node = parse_yaml(text, source=source)
    state = parse_model(ClusterState, data, node, source=source)
    return check_fixture(state, source=source)


def load_fixture(path: Path) -> ClusterState:
    state = load_fixture_text(read_text(path), source=str(path))
    _logger.info(f"Fixture loaded: {len(state.nodes)} nodes, {len(state.pods)} pods, {len(state.services)} services")
    return state


def dump_fixture(state: ClusterState) -> str:
    return dump_yaml(state.to_document())
