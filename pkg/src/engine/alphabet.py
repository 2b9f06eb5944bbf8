# -*- coding: utf-8 -*-
from typing import List, Optional

from src.cluster.model import (
    NODE_PORT_MAX,
    NODE_PORT_MIN,
    ROOT_DIRECTORY,
    ClusterState,
    PayloadRoute,
    Volume,
    VolumeKind,
)
from src.cluster.rbac import known_principals
from src.engine.actions import (
    AddNodePort,
    AnyAction,
    Authenticate,
    ChrootEscape,
    Connect,
    ConsumeTopic,
    DeletePod,
    DeployImage,
    EditBuildStep,
    JenkinsLogin,
    KubectlApply,
    KubectlExec,
    PodManifest,
    ProduceTopic,
    PullImage,
    ReadNodeKubeconfig,
    RunBuild,
    ServiceManifest,
    TriggerPayloadRoute,
)

PROBE_POD = "probe"
PROBE_SERVICE = "probe-ui"
PROBE_LABELS = {"app": PROBE_POD}
PROBE_ROUTE = PayloadRoute(route="/probe", disclosed_file="requirements.txt")
PROBE_RECORD = "probe"


def free_node_port(state: ClusterState) -> Optional[int]:
    used = {s.node_port for s in state.services}
    return next((port for port in range(NODE_PORT_MIN, NODE_PORT_MAX + 1) if port not in used), None)


def action_alphabet(state: ClusterState) -> List[AnyAction]:
    """
    Enumerates a finite set of concrete actions over the entities of `state`.

    Besides the existing resources, every namespace gets a probe pod mounting the node root and a probe
    NodePort service in front of it, so that creation, exec and escape are all part of the search.

    Args:
        state (ClusterState): The world the actions are built for.

    Returns:
        List[AnyAction]: Actions in a stable order.
    """
    actions: List[AnyAction] = [Authenticate(subject=subject) for subject in sorted(known_principals(state))]
    images = sorted(i.ref for i in state.registry.images)
    node_port = free_node_port(state)

    for namespace in state.namespace_names():
        if images:
            volume = Volume(kind=VolumeKind.HOST_PATH, mount_point="/host", host_directory=ROOT_DIRECTORY)
            manifest = PodManifest(
                name=PROBE_POD, namespace=namespace, image=images[0], labels=PROBE_LABELS, volumes=[volume]
            )
            actions.append(KubectlApply(manifest=manifest))
        service = ServiceManifest(
            name=PROBE_SERVICE, namespace=namespace, selector=PROBE_LABELS, port=8080, node_port=node_port
        )
        actions.append(KubectlApply(manifest=service))
        actions.append(KubectlExec(pod=PROBE_POD, namespace=namespace))
        actions.append(Connect(service=PROBE_SERVICE, namespace=namespace))

    for pod in state.pods:
        actions.append(KubectlExec(pod=pod.name, namespace=pod.namespace))
        actions.append(DeletePod(pod=pod.name, namespace=pod.namespace))
        actions.extend(DeployImage(image=image, namespace=pod.namespace, pod=pod.name) for image in images)

    actions.extend([ChrootEscape(), ReadNodeKubeconfig()])

    routes = sorted({route for image in state.registry.images for route in image.payload_routes} | {PROBE_ROUTE.route})
    for service in state.services:
        if node_port is not None:
            actions.append(AddNodePort(service=service.name, namespace=service.namespace, node_port=node_port))
        actions.append(Connect(service=service.name, namespace=service.namespace))
        actions.extend(
            TriggerPayloadRoute(service=service.name, namespace=service.namespace, url_path=route) for route in routes
        )

    for broker in state.brokers:
        ref = broker.service
        for topic in broker.topics:
            actions.append(ConsumeTopic(service=ref.name, namespace=ref.namespace, topic=topic))
            actions.append(ProduceTopic(service=ref.name, namespace=ref.namespace, topic=topic, record=PROBE_RECORD))

    if state.ci_server is not None:
        actions.extend(JenkinsLogin(user=user.name) for user in state.ci_server.users)
        for name in sorted(state.ci_server.jobs):
            actions.append(EditBuildStep(job=name, step_index=0, script="echo probe", payload=PROBE_ROUTE))
            actions.append(RunBuild(job=name))

    actions.extend(PullImage(image=image) for image in images)
    return actions
