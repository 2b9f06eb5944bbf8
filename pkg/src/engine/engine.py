# -*- coding: utf-8 -*-
import ipaddress
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.cluster.model import (
    NODE_PORT_MAX,
    NODE_PORT_MIN,
    BrokerApp,
    BuildStep,
    ClusterState,
    Credential,
    CredentialLevel,
    Image,
    Pod,
    ResourceKind,
    Service,
    Verb,
    in_node_port_range,
)
from src.cluster.network import reachable
from src.cluster.rbac import authorize, known_principals
from src.cluster.session import Location, LocationKind, Session, ShellKind, ShellRef
from src.common.exceptions import AuthorizationError
from src.common.utils.logger import get_logger
from src.engine.actions import (
    ActionKind,
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
from src.engine.results import ActionResult, Observation
from src.policy.evaluate import evaluate
from src.policy.model import PolicySet

_logger = get_logger(__name__)

CLUSTER_IP_POOL = "10.43.200.0/22"
NOT_FOUND = "not found"
NO_ESCAPE_VOLUME = "no escape volume"

_REQUIRED_NAMES = ("subject", "pod", "namespace", "service", "topic", "user", "job", "image")

Outcome = Tuple[Optional[ClusterState], ActionResult]


class _PreconditionFailed(Exception):
    pass


def _require(condition: Any, reason: str) -> None:
    if not condition:
        raise _PreconditionFailed(reason)


def _malformed(action: AnyAction) -> Optional[str]:
    for name in _REQUIRED_NAMES:
        value = getattr(action, name, None)
        if isinstance(value, str) and not value.strip():
            return f"malformed {action.kind}: empty {name}"
    if isinstance(action, KubectlApply) and not (action.manifest.name and action.manifest.namespace):
        return f"malformed {action.kind}: manifest needs a name and a namespace"
    if isinstance(action, TriggerPayloadRoute) and not action.url_path.startswith("/"):
        return f"malformed {action.kind}: url path must start with '/'"
    return None


def _sync_containers(state: ClusterState) -> None:
    for node in state.nodes:
        node.running_containers = sorted(p.ref for p in state.pods if p.node == node.name)


def _put_pod(state: ClusterState, pod: Pod) -> None:
    state.pods = [p for p in state.pods if p.ref != pod.ref] + [pod]
    _sync_containers(state)


def _allocate_cluster_ip(state: ClusterState) -> str:
    used = {s.cluster_ip for s in state.services}
    for host in ipaddress.ip_network(CLUSTER_IP_POOL).hosts():
        if str(host) not in used:
            return str(host)
    raise _PreconditionFailed("cluster IP pool exhausted")


def _rbac_denial(state: ClusterState, session: Session, action: AnyAction) -> Optional[str]:
    """Reason the active credential lacks the grant an action needs, `None` when it holds it."""
    requirement: Optional[Tuple[Verb, ResourceKind, str]] = None

    if isinstance(action, KubectlApply):
        manifest = action.manifest
        if isinstance(manifest, PodManifest):
            exists = state.pod(manifest.name, manifest.namespace) is not None
            kind = ResourceKind.POD
        else:
            exists = state.service(manifest.name, manifest.namespace) is not None
            kind = ResourceKind.SERVICE
        requirement = (Verb.UPDATE if exists else Verb.CREATE, kind, manifest.namespace)
    elif isinstance(action, KubectlExec):
        requirement = (Verb.UPDATE, ResourceKind.POD, action.namespace)
    elif isinstance(action, AddNodePort):
        requirement = (Verb.UPDATE, ResourceKind.SERVICE, action.namespace)
    elif isinstance(action, DeployImage):
        exists = state.pod(action.pod, action.namespace) is not None
        requirement = (Verb.UPDATE if exists else Verb.CREATE, ResourceKind.POD, action.namespace)
    elif isinstance(action, DeletePod):
        requirement = (Verb.DELETE, ResourceKind.POD, action.namespace)
    elif isinstance(action, (EditBuildStep, RunBuild)):
        if state.ci_server is None or not state.ci_server.is_user(session.credential):
            return f"{session.principal} is not a CI user"
        return None

    if requirement is None:
        return None
    verb, kind, namespace = requirement
    if authorize(state, session, verb, kind, namespace):
        return None
    return f"{session.principal} cannot {Verb(verb).value} {ResourceKind(kind).value} in namespace {namespace}"


def _authenticate(state: ClusterState, session: Session, action: Authenticate) -> Outcome:
    credential = session.held(action.subject)
    _require(credential is not None, f"no credential held for {action.subject}")
    _require(action.subject in known_principals(state), f"unknown principal: {action.subject}")
    return None, ActionResult.applied_with(
        session.copy(update={"credential": credential}), Observation(credential=credential)
    )


def _apply_pod(draft: ClusterState, manifest: PodManifest) -> Observation:
    _require(draft.registry.get(manifest.image) is not None, f"image {manifest.image} not in registry")
    _require(
        draft.service_account(manifest.service_account, manifest.namespace) is not None,
        f"service account {manifest.service_account} not found in namespace {manifest.namespace}",
    )
    for volume in manifest.volumes:
        _require(
            not volume.is_host_path or (volume.host_directory or "").startswith("/"),
            "hostPath volume needs an absolute host directory",
        )
    existing = draft.pod(manifest.name, manifest.namespace)
    _require(draft.nodes, "no node available")
    node = manifest.node or (existing.node if existing is not None else draft.schedule_node())
    _require(draft.node(node) is not None, f"node {node} not found")

    pod = Pod(
        name=manifest.name,
        namespace=manifest.namespace,
        node=node,
        image=manifest.image,
        service_account=manifest.service_account,
        labels=dict(manifest.labels),
        volumes=list(manifest.volumes),
        ready=True,
    )
    _put_pod(draft, pod)
    return Observation(pod=pod.ref, node=node)


def _apply_service(draft: ClusterState, manifest: ServiceManifest) -> Observation:
    _require(0 < manifest.port < 65536, f"port {manifest.port} out of range")
    ref = f"{manifest.namespace}/{manifest.name}"
    others = [s for s in draft.services if s.ref != ref]
    if manifest.node_port is not None:
        _require(
            in_node_port_range(manifest.node_port),
            f"nodePort {manifest.node_port} outside {NODE_PORT_MIN}-{NODE_PORT_MAX}",
        )
        _require(
            all(s.node_port != manifest.node_port for s in others), f"nodePort {manifest.node_port} already in use"
        )
    existing = draft.service(manifest.name, manifest.namespace)
    _require(
        existing is None or existing.node_port == manifest.node_port,
        f"service {ref} exists; change its nodePort through AddNodePort",
    )
    cluster_ip = manifest.cluster_ip or (existing.cluster_ip if existing is not None else _allocate_cluster_ip(draft))
    _require(all(s.cluster_ip != cluster_ip for s in others), f"clusterIP {cluster_ip} already in use")

    service = Service(
        name=manifest.name,
        namespace=manifest.namespace,
        selector=dict(manifest.selector),
        cluster_ip=cluster_ip,
        port=manifest.port,
        node_port=manifest.node_port,
    )
    draft.services = others + [service]
    return Observation(endpoint=service.endpoint())


def _kubectl_apply(state: ClusterState, session: Session, action: KubectlApply) -> Outcome:
    manifest = action.manifest
    _require(manifest.namespace in state.namespace_names(), f"namespace {manifest.namespace} not found")
    draft = state.copy(deep=True)
    if isinstance(manifest, PodManifest):
        observation = _apply_pod(draft, manifest)
    else:
        observation = _apply_service(draft, manifest)
    return draft, ActionResult.applied_with(session, observation)


def _kubectl_exec(state: ClusterState, session: Session, action: KubectlExec) -> Outcome:
    pod = state.pod(action.pod, action.namespace)
    _require(pod is not None, f"pod {action.namespace}/{action.pod} not found")
    assert pod is not None
    _require(pod.ready, f"pod {pod.ref} not ready")
    successor = session.copy(
        update={
            "open_shell": ShellRef(kind=ShellKind.POD, name=pod.name, namespace=pod.namespace),
            "location": Location.in_cluster(pod.namespace),
        }
    )
    return None, ActionResult.applied_with(successor, Observation(pod=pod.ref, node=pod.node))


def chroot_escape(state: ClusterState, session: Session) -> ActionResult:
    """
    Escapes from the open pod shell onto the pod's node through a hostPath volume mounting the node root.

    Args:
        state (ClusterState): The current world; not modified.
        session (Session): A session holding an open pod shell.

    Returns:
        ActionResult: Applied with an on-node session and a nodeRoot credential, or FailedPrecondition.
    """
    shell = session.open_shell
    if shell is None or shell.kind != ShellKind.POD:
        return ActionResult.failed("no open pod shell")
    pod = state.pod(shell.name, shell.namespace or "")
    if pod is None:
        return ActionResult.failed(f"pod {shell.namespace}/{shell.name} not found")
    if not any(v.mounts_host_root for v in pod.volumes):
        return ActionResult.failed(NO_ESCAPE_VOLUME)
    node = state.node(pod.node)
    if node is None:
        return ActionResult.failed(f"node {pod.node} not found")

    root = Credential(subject=f"root@{node.name}", level=CredentialLevel.NODE_ROOT)
    successor = session.with_credentials(root).copy(
        update={"location": Location.on_node(node.name), "open_shell": ShellRef(kind=ShellKind.NODE, name=node.name)}
    )
    observation = Observation(credential=root, node=node.name, containers=list(node.running_containers))
    return ActionResult.applied_with(successor, observation)


def read_node_kubeconfig(state: ClusterState, session: Session) -> ActionResult:
    """Reads the node-local kubeconfig from an on-node session and adds its admin credential to the wallet."""
    location = session.location
    if location.kind != LocationKind.ON_NODE:
        return ActionResult.failed("not on a node")
    node = state.node(location.node or "")
    if node is None:
        return ActionResult.failed(f"node {location.node} not found")
    paths = node.kubeconfig_paths()
    credential = state.node_credentials.get(node.name)
    if not paths or credential is None:
        return ActionResult.failed(f"no kubeconfig on node {node.name}")
    observation = Observation(credential=credential, content=node.host_files[paths[0]], node=node.name)
    return ActionResult.applied_with(session.with_credentials(credential), observation)


def _chroot_escape(state: ClusterState, session: Session, action: ChrootEscape) -> Outcome:
    return None, chroot_escape(state, session)


def _read_node_kubeconfig(state: ClusterState, session: Session, action: ReadNodeKubeconfig) -> Outcome:
    return None, read_node_kubeconfig(state, session)


def _add_node_port(state: ClusterState, session: Session, action: AddNodePort) -> Outcome:
    service = state.service(action.service, action.namespace)
    _require(service is not None, f"service {action.namespace}/{action.service} not found")
    port = action.node_port
    _require(in_node_port_range(port), f"nodePort {port} outside {NODE_PORT_MIN}-{NODE_PORT_MAX}")
    clash = next((s for s in state.services if s.node_port == port and s is not service), None)
    _require(clash is None, f"nodePort {port} already used by {clash.ref if clash else ''}")

    draft = state.copy(deep=True)
    exposed = draft.service(action.service, action.namespace)
    assert exposed is not None
    exposed.node_port = port
    return draft, ActionResult.applied_with(session, Observation(endpoint=exposed.endpoint()))


def _reach(state: ClusterState, session: Session, name: str, namespace: str) -> Service:
    service = state.service(name, namespace)
    _require(service is not None, f"service {namespace}/{name} not found")
    assert service is not None
    _require(reachable(state, session.location, service), f"service {service.ref} unreachable from {session.location}")
    return service


def _connect(state: ClusterState, session: Session, action: Connect) -> Outcome:
    service = _reach(state, session, action.service, action.namespace)
    pods = state.backing_pods(service)
    _require(pods, f"no ready pod behind {service.ref}")
    successor = session
    image = state.registry.get(pods[0].image)
    if image is not None and image.relay and session.location.kind == LocationKind.EXTERNAL:
        successor = session.copy(update={"location": Location.in_cluster(service.namespace)})
    return None, ActionResult.applied_with(successor, Observation(endpoint=service.endpoint(), pod=pods[0].ref))


def _broker(state: ClusterState, session: Session, name: str, namespace: str, topic: str) -> BrokerApp:
    service = _reach(state, session, name, namespace)
    broker = state.broker_for(service.name, service.namespace)
    _require(broker is not None, f"no broker behind {service.ref}")
    assert broker is not None
    _require(topic in broker.topics, f"unknown topic {topic}")
    return broker


def _consume_topic(state: ClusterState, session: Session, action: ConsumeTopic) -> Outcome:
    broker = _broker(state, session, action.service, action.namespace, action.topic)
    return None, ActionResult.applied_with(session, Observation(records=list(broker.topics[action.topic])))


def _produce_topic(state: ClusterState, session: Session, action: ProduceTopic) -> Outcome:
    _broker(state, session, action.service, action.namespace, action.topic)
    draft = state.copy(deep=True)
    broker = draft.broker_for(action.service, action.namespace)
    assert broker is not None
    broker.topics[action.topic].append(action.record)
    return draft, ActionResult.applied_with(session, Observation(records=[action.record]))


def _jenkins_login(state: ClusterState, session: Session, action: JenkinsLogin) -> Outcome:
    ci_server = state.ci_server
    _require(ci_server is not None, "no CI server")
    assert ci_server is not None
    user = ci_server.user(action.user)
    _require(user is not None, f"unknown CI user {action.user}")
    assert user is not None
    _require(session.held(user.credential.subject) == user.credential, f"no credential held for {action.user}")
    successor = session.with_credentials(user.credential, *ci_server.deploy_credentials).copy(
        update={"credential": user.credential}
    )
    return None, ActionResult.applied_with(successor, Observation(credential=user.credential))


def _edit_build_step(state: ClusterState, session: Session, action: EditBuildStep) -> Outcome:
    assert state.ci_server is not None
    job = state.ci_server.jobs.get(action.job)
    _require(job is not None, f"unknown job {action.job}")
    assert job is not None
    _require(0 <= action.step_index < len(job.steps), f"step {action.step_index} out of range for job {action.job}")

    draft = state.copy(deep=True)
    assert draft.ci_server is not None
    draft.ci_server.jobs[action.job].steps[action.step_index] = BuildStep(script=action.script, payload=action.payload)
    return draft, ActionResult.applied_with(session)


def _run_build(state: ClusterState, session: Session, action: RunBuild) -> Outcome:
    assert state.ci_server is not None
    job = state.ci_server.jobs.get(action.job)
    _require(job is not None, f"unknown job {action.job}")
    assert job is not None
    repo = state.source_repo
    _require(repo is not None and repo.name == job.source_ref, f"source repository {job.source_ref} not found")
    assert repo is not None

    build = job.last_build + 1
    image = Image(
        name=job.output_image_name,
        tag=str(build),
        files=dict(repo.files),
        payload_routes={s.payload.route: s.payload.disclosed_file for s in job.steps if s.payload is not None},
        build_number=build,
    )
    draft = state.copy(deep=True)
    assert draft.ci_server is not None
    draft.registry.images = [i for i in draft.registry.images if i.ref != image.ref] + [image]
    draft.ci_server.jobs[action.job].last_build = build
    return draft, ActionResult.applied_with(session, Observation(image=image.ref))


def _pull_image(state: ClusterState, session: Session, action: PullImage) -> Outcome:
    image = state.registry.get(action.image)
    _require(image is not None, f"image {action.image} not in registry")
    return None, ActionResult.applied_with(session, Observation(image=action.image))


def _deploy_image(state: ClusterState, session: Session, action: DeployImage) -> Outcome:
    _require(state.registry.get(action.image) is not None, f"image {action.image} not in registry")
    _require(action.namespace in state.namespace_names(), f"namespace {action.namespace} not found")
    existing = state.pod(action.pod, action.namespace)
    if existing is not None:
        update: Dict[str, Any] = {"image": action.image, "ready": True}
        if action.labels:
            update["labels"] = dict(action.labels)
        pod = existing.copy(deep=True, update=update)
    else:
        _require(state.nodes, "no node available")
        manifest = PodManifest(
            name=action.pod, namespace=action.namespace, image=action.image, labels=action.labels or {"app": action.pod}
        )
        _require(
            state.service_account(manifest.service_account, action.namespace) is not None,
            f"service account {manifest.service_account} not found in namespace {action.namespace}",
        )
        pod = Pod(
            name=manifest.name,
            namespace=manifest.namespace,
            node=state.schedule_node(),
            image=manifest.image,
            service_account=manifest.service_account,
            labels=dict(manifest.labels),
        )
    draft = state.copy(deep=True)
    _put_pod(draft, pod)
    return draft, ActionResult.applied_with(session, Observation(pod=pod.ref, image=action.image, node=pod.node))


def _trigger_payload_route(state: ClusterState, session: Session, action: TriggerPayloadRoute) -> Outcome:
    service = _reach(state, session, action.service, action.namespace)
    pods = state.backing_pods(service)
    _require(pods, f"no ready pod behind {service.ref}")
    image = state.registry.get(pods[0].image)
    disclosed = image.payload_routes.get(action.url_path) if image is not None else None
    _require(image is not None and disclosed is not None, NOT_FOUND)
    assert image is not None and disclosed is not None
    content = image.files.get(disclosed)
    _require(content is not None, NOT_FOUND)
    return None, ActionResult.applied_with(session, Observation(content=content, disclosed_file=disclosed))


def _delete_pod(state: ClusterState, session: Session, action: DeletePod) -> Outcome:
    pod = state.pod(action.pod, action.namespace)
    _require(pod is not None, f"pod {action.namespace}/{action.pod} not found")
    assert pod is not None
    draft = state.copy(deep=True)
    draft.pods = [p for p in draft.pods if p.ref != pod.ref]
    _sync_containers(draft)
    return draft, ActionResult.applied_with(session, Observation(pod=pod.ref, node=pod.node))


_HANDLERS: Dict[str, Callable[[ClusterState, Session, Any], Outcome]] = {
    ActionKind.AUTHENTICATE.value: _authenticate,
    ActionKind.KUBECTL_APPLY.value: _kubectl_apply,
    ActionKind.KUBECTL_EXEC.value: _kubectl_exec,
    ActionKind.CHROOT_ESCAPE.value: _chroot_escape,
    ActionKind.READ_NODE_KUBECONFIG.value: _read_node_kubeconfig,
    ActionKind.ADD_NODE_PORT.value: _add_node_port,
    ActionKind.CONNECT.value: _connect,
    ActionKind.CONSUME_TOPIC.value: _consume_topic,
    ActionKind.PRODUCE_TOPIC.value: _produce_topic,
    ActionKind.JENKINS_LOGIN.value: _jenkins_login,
    ActionKind.EDIT_BUILD_STEP.value: _edit_build_step,
    ActionKind.RUN_BUILD.value: _run_build,
    ActionKind.PULL_IMAGE.value: _pull_image,
    ActionKind.DEPLOY_IMAGE.value: _deploy_image,
    ActionKind.TRIGGER_PAYLOAD_ROUTE.value: _trigger_payload_route,
    ActionKind.DELETE_POD.value: _delete_pod,
}


def _decide(state: ClusterState, session: Session, action: AnyAction, policy: PolicySet) -> Outcome:
    decision = evaluate(policy, state, session, action)
    if decision.blocked:
        assert decision.rule_id is not None
        return None, ActionResult.blocked(decision.rule_id, decision.reason)

    try:
        denial = _rbac_denial(state, session, action)
    except AuthorizationError as e:
        denial = str(e)
    if denial is not None:
        return None, ActionResult.denied(denial)

    malformed = _malformed(action)
    if malformed is not None:
        return None, ActionResult.failed(malformed)
    try:
        return _HANDLERS[action.kind](state, session, action)
    except _PreconditionFailed as e:
        return None, ActionResult.failed(str(e))


def apply_action(
    state: ClusterState, session: Session, action: AnyAction, policy: Optional[PolicySet] = None
) -> Tuple[ClusterState, ActionResult]:
    """
    Applies one attacker or operator step.

    Policy rules are consulted first, then RBAC, then the action's own preconditions. A result that is not
    Applied returns `state` itself untouched; an Applied one returns a fresh state whose clock moved by one.

    Args:
        state (ClusterState): The current world; never modified in place.
        session (Session): The acting session.
        action (AnyAction): The step to apply.
        policy (Optional[PolicySet]): Active mitigations, none by default.

    Returns:
        Tuple[ClusterState, ActionResult]: The successor state and the result; an Applied result carries
        the successor session.
    """
    draft, result = _decide(state, session, action, policy or PolicySet())
    _logger.debug(f"{action.kind} as {session.principal}: {result.status} {result.reason or ''}".rstrip())
    if not result.applied:
        return state, result

    successor = draft if draft is not None else state.copy(deep=True)
    successor.clock += 1
    return successor, result


def run_actions(
    state: ClusterState, session: Session, actions: List[AnyAction], policy: Optional[PolicySet] = None
) -> Tuple[ClusterState, Session, List[ActionResult]]:
    """Applies `actions` in order, stopping at the first one that is not Applied."""
    results: List[ActionResult] = []
    for action in actions:
        state, result = apply_action(state, session, action, policy)
        results.append(result)
        if not result.applied:
            break
        assert result.session is not None
        session = result.session
    return state, session, results
