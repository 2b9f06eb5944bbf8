# -*- coding: utf-8 -*-
import pytest

from src.cluster.model import ClusterState, Exposure, Service
from src.cluster.network import reachable, resolve_service
from src.cluster.session import Location
from src.common.exceptions import NotFoundError
from src.engine.actions import AddNodePort
from src.engine.engine import apply_action
from tests.factories import session_for

pytestmark = pytest.mark.unit


def _broker(state: ClusterState) -> Service:
    service = state.service("strimzi-service", "kafka")
    assert service is not None
    return service


def test_internal_broker_is_unreachable_from_outside(canonical: ClusterState) -> None:
    assert not reachable(canonical, Location.external(), _broker(canonical))


def test_internal_broker_is_reachable_from_its_namespace(canonical: ClusterState) -> None:
    assert reachable(canonical, Location.in_cluster("kafka"), _broker(canonical))


def test_internal_broker_is_reachable_from_a_node(canonical: ClusterState) -> None:
    assert reachable(canonical, Location.on_node("k8s-master"), _broker(canonical))


def test_broker_is_reachable_from_outside_once_exposed(canonical: ClusterState) -> None:
    admin = session_for(canonical, "kubernetes-admin")
    action = AddNodePort(service="strimzi-service", namespace="kafka", node_port=30123)
    exposed, result = apply_action(canonical, admin, action)

    assert result.applied
    assert reachable(exposed, Location.external(), _broker(exposed))


def test_reachable_rejects_unknown_service(canonical: ClusterState) -> None:
    ghost = _broker(canonical).copy(update={"name": "ghost"})
    with pytest.raises(NotFoundError):
        reachable(canonical, Location.in_cluster("kafka"), ghost)


def test_resolve_service_on_fresh_fixture_is_internal(canonical: ClusterState) -> None:
    endpoint = resolve_service(canonical, "strimzi-service", "kafka")
    assert endpoint.exposure == Exposure.INTERNAL_ONLY
    assert (endpoint.cluster_ip, endpoint.port, endpoint.node_port) == ("10.43.12.7", 9092, None)


def test_resolve_service_carries_the_node_port_after_exposure(canonical: ClusterState) -> None:
    admin = session_for(canonical, "kubernetes-admin")
    action = AddNodePort(service="strimzi-service", namespace="kafka", node_port=30500)
    exposed, _ = apply_action(canonical, admin, action)

    endpoint = resolve_service(exposed, "strimzi-service", "kafka")
    assert endpoint.exposure == Exposure.NODE_PORT
    assert endpoint.node_port == 30500


def test_resolve_service_unknown_name(canonical: ClusterState) -> None:
    with pytest.raises(NotFoundError, match="kafka/nope"):
        resolve_service(canonical, "nope", "kafka")
