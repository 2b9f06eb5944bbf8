# -*- coding: utf-8 -*-
from src.cluster.model import ClusterState, Endpoint, Exposure, Service
from src.cluster.session import Location, LocationKind
from src.common.exceptions import NotFoundError


def reachable(state: ClusterState, location: Location, service: Service) -> bool:
    """
    Two network zones plus the nodes: internal services answer only from inside the cluster or from a node,
    NodePort services answer from everywhere.
    """
    current = state.service(service.name, service.namespace)
    if current is None:
        raise NotFoundError(f"service not found: {service.ref}")
    if current.exposure == Exposure.NODE_PORT:
        return True
    return location.kind != LocationKind.EXTERNAL


def resolve_service(state: ClusterState, name: str, namespace: str) -> Endpoint:
    service = state.service(name, namespace)
    if service is None:
        raise NotFoundError(f"service not found: {namespace}/{name}")
    return service.endpoint()
