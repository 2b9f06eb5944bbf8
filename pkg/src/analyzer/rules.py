# -*- coding: utf-8 -*-
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, List, Optional, Tuple

from src.analyzer.capabilities import Capability, CapabilityKind
from src.cluster.model import (
    ROOT_DIRECTORY,
    ClusterState,
    Credential,
    CredentialLevel,
    Exposure,
    ResourceKind,
    Verb,
    Volume,
    VolumeKind,
    service_account_namespace,
)
from src.cluster.rbac import authorize
from src.cluster.session import Session
from src.common.exceptions import AuthorizationError
from src.engine.actions import (
    ActionKind,
    AddNodePort,
    AnyAction,
    DeployImage,
    EditBuildStep,
    KubectlApply,
    KubectlExec,
    PodManifest,
    ServiceManifest,
)
from src.engine.alphabet import free_node_port
from src.policy.evaluate import evaluate
from src.policy.model import PolicySet

ANONYMOUS = Credential(subject="system:anonymous", level=CredentialLevel.USER)

Footprint = Tuple[str, Optional[str]]


@dataclass(frozen=True)
class GuardContext:
    """What guards may consult: the fixture, the active mitigations and the principal the analysis runs as."""

    state: ClusterState
    policy: PolicySet
    session: Session

    def passes(self, action: AnyAction, session: Optional[Session] = None) -> bool:
        return not evaluate(self.policy, self.state, session or self.session, action).blocked

    @property
    def home_namespace(self) -> Optional[str]:
        return service_account_namespace(self.session.principal)


def _always(ctx: GuardContext) -> bool:
    return True


@dataclass(frozen=True)
class TransitionRule:
    """One abstract attack step: holding every capability in `requires` and passing `guard` yields `yields`."""

    id: str
    requires: FrozenSet[Capability]
    yields: Capability
    guard: Callable[[GuardContext], bool] = field(default=_always, compare=False, repr=False)
    footprint: Tuple[Footprint, ...] = ()

    def __post_init__(self) -> None:
        if self.yields in self.requires:
            raise ValueError(f"rule {self.id} yields a capability it requires")

    def within(self, steps: FrozenSet[Footprint]) -> bool:
        """True when every action this rule stands for appears among `steps`; a `None` key matches any target."""
        kinds = {kind for kind, _ in steps}
        return all((kind in kinds) if key is None else ((kind, key) in steps) for kind, key in self.footprint)


def _cap(kind: CapabilityKind, arg: str = "") -> Capability:
    return Capability.of(kind, arg)


def _relay_guard(namespace: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        relay = next((i for i in ctx.state.registry.images if i.relay), None)
        if relay is None:
            return False
        labels = {"app": "relay"}
        pod = PodManifest(name="relay", namespace=namespace, image=relay.ref, labels=labels)
        node_port = free_node_port(ctx.state)
        if node_port is None:
            return False
        service = ServiceManifest(name="relay-ui", namespace=namespace, selector=labels, port=5000, node_port=node_port)
        return ctx.passes(KubectlApply(manifest=pod)) and ctx.passes(KubectlApply(manifest=service))

    return guard


def _exec_guard(namespace: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        if not ctx.state.registry.images:
            return False
        pod = PodManifest(name="shell", namespace=namespace, image=ctx.state.registry.images[0].ref)
        return ctx.passes(KubectlApply(manifest=pod)) and ctx.passes(KubectlExec(pod="shell", namespace=namespace))

    return guard


def _escape_guard(namespace: str, node: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        if not ctx.state.registry.images:
            return False
        volume = Volume(kind=VolumeKind.HOST_PATH, mount_point="/host", host_directory=ROOT_DIRECTORY)
        pod = PodManifest(
            name="escape", namespace=namespace, node=node, image=ctx.state.registry.images[0].ref, volumes=[volume]
        )
        return ctx.passes(KubectlApply(manifest=pod))

    return guard


def _kubeconfig_guard(node: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        found = ctx.state.node(node)
        credential = ctx.state.node_credentials.get(node)
        return found is not None and bool(found.kubeconfig_paths()) and credential is not None

    return guard


def _delete_guard(namespace: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        return namespace != ctx.home_namespace

    return guard


def _expose_guard(name: str, namespace: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        service = ctx.state.service(name, namespace)
        if service is None or not ctx.state.backing_pods(service):
            return False
        node_port = free_node_port(ctx.state)
        if node_port is None:
            return False
        return ctx.passes(AddNodePort(service=name, namespace=namespace, node_port=node_port))

    return guard


def _backdoor_guard(job_name: str) -> Callable[[GuardContext], bool]:
    def guard(ctx: GuardContext) -> bool:
        ci_server = ctx.state.ci_server
        job = ci_server.jobs.get(job_name) if ci_server is not None else None
        if ci_server is None or job is None or job.deploy_target is None:
            return False
        target = job.deploy_target
        edit = EditBuildStep(job=job_name, step_index=0, script="payload")
        if not ctx.passes(edit):
            return False

        existing = ctx.state.pod(target.pod, target.namespace)
        labels = existing.labels if existing is not None else {"app": target.pod}
        verb = Verb.UPDATE if existing is not None else Verb.CREATE
        image = f"{job.output_image_name}:{job.last_build + 1}"
        deploy = DeployImage(image=image, namespace=target.namespace, pod=target.pod)
        deployable = False
        for credential in ci_server.deploy_credentials:
            session = Session.start(credential)
            try:
                granted = authorize(ctx.state, session, verb, ResourceKind.POD, target.namespace)
            except AuthorizationError:
                granted = False
            if granted and ctx.passes(deploy, session=session):
                deployable = True
                break
        if not deployable:
            return False

        return any(
            s.namespace == target.namespace
            and s.exposure == Exposure.NODE_PORT
            and bool(s.selector)
            and all(labels.get(k) == v for k, v in s.selector.items())
            for s in ctx.state.services
        )

    return guard


def build_rules(state: ClusterState) -> List[TransitionRule]:
    """
    Instantiates the transition rules for the entities of `state`.

    Args:
        state (ClusterState): The fixture the rules are bound to.

    Returns:
        List[TransitionRule]: Rules ordered by id.
    """
    admin = frozenset({_cap(CapabilityKind.CLUSTER_ADMIN)})
    in_cluster = _cap(CapabilityKind.IN_CLUSTER_NETWORK)
    rules: List[TransitionRule] = []

    for namespace in state.namespace_names():
        deploy_in = _cap(CapabilityKind.DEPLOY_IN_NAMESPACE, namespace)
        crud_in = _cap(CapabilityKind.CRUD_IN, namespace)
        shell_in = _cap(CapabilityKind.SHELL_IN_POD, namespace)
        apply_in: Footprint = (ActionKind.KUBECTL_APPLY.value, namespace)

        rules.append(
            TransitionRule(
                id=f"relay[{namespace}]",
                requires=frozenset({deploy_in}),
                yields=in_cluster,
                guard=_relay_guard(namespace),
                footprint=(apply_in, (ActionKind.CONNECT.value, namespace)),
            )
        )
        rules.append(
            TransitionRule(
                id=f"exec-shell[{namespace}]",
                requires=frozenset({crud_in}),
                yields=shell_in,
                guard=_exec_guard(namespace),
                footprint=(apply_in, (ActionKind.KUBECTL_EXEC.value, namespace)),
            )
        )
        rules.append(
            TransitionRule(id=f"shell-network[{namespace}]", requires=frozenset({shell_in}), yields=in_cluster)
        )
        rules.append(TransitionRule(id=f"admin-crud[{namespace}]", requires=admin, yields=crud_in))
        rules.append(TransitionRule(id=f"admin-deploy[{namespace}]", requires=admin, yields=deploy_in))
        for node in state.nodes:
            rules.append(
                TransitionRule(
                    id=f"hostpath-escape[{namespace}:{node.name}]",
                    requires=frozenset({shell_in}),
                    yields=_cap(CapabilityKind.NODE_ROOT, node.name),
                    guard=_escape_guard(namespace, node.name),
                    footprint=(apply_in, (ActionKind.CHROOT_ESCAPE.value, None)),
                )
            )
        if any(p.namespace == namespace for p in state.pods):
            rules.append(
                TransitionRule(
                    id=f"admin-delete[{namespace}]",
                    requires=admin,
                    yields=_cap(CapabilityKind.CROSS_NAMESPACE_DELETE),
                    guard=_delete_guard(namespace),
                    footprint=((ActionKind.DELETE_POD.value, namespace),),
                )
            )

    for node in state.nodes:
        rules.append(
            TransitionRule(
                id=f"node-kubeconfig[{node.name}]",
                requires=frozenset({_cap(CapabilityKind.NODE_ROOT, node.name)}),
                yields=_cap(CapabilityKind.CLUSTER_ADMIN),
                guard=_kubeconfig_guard(node.name),
                footprint=((ActionKind.READ_NODE_KUBECONFIG.value, None), (ActionKind.AUTHENTICATE.value, None)),
            )
        )

    for service in state.services:
        ingress = _cap(CapabilityKind.INGRESS_CREATE_ON, service.ref)
        rules.append(TransitionRule(id=f"admin-ingress[{service.ref}]", requires=admin, yields=ingress))
        rules.append(
            TransitionRule(
                id=f"expose[{service.ref}]",
                requires=frozenset({ingress}),
                yields=_cap(CapabilityKind.EXTERNAL_EXPOSURE, service.ref),
                guard=_expose_guard(service.name, service.namespace),
                footprint=((ActionKind.ADD_NODE_PORT.value, service.namespace),),
            )
        )

    for broker in state.brokers:
        ref = broker.service
        consume: Footprint = (ActionKind.CONSUME_TOPIC.value, ref.namespace)
        for topic in broker.topics:
            topic_read = _cap(CapabilityKind.TOPIC_READ, topic)
            rules.append(
                TransitionRule(
                    id=f"topic-read[{ref.ref}:{topic}]",
                    requires=frozenset({in_cluster}),
                    yields=topic_read,
                    footprint=(consume,),
                )
            )
            rules.append(
                TransitionRule(
                    id=f"exposed-topic-read[{ref.ref}:{topic}]",
                    requires=frozenset({_cap(CapabilityKind.EXTERNAL_EXPOSURE, ref.ref)}),
                    yields=topic_read,
                    footprint=(consume,),
                )
            )

    if state.ci_server is not None:
        for name, job in sorted(state.ci_server.jobs.items()):
            footprint: Tuple[Footprint, ...] = (
                (ActionKind.EDIT_BUILD_STEP.value, name),
                (ActionKind.RUN_BUILD.value, name),
            )
            if job.deploy_target is not None:
                footprint += (
                    (ActionKind.DEPLOY_IMAGE.value, job.deploy_target.namespace),
                    (ActionKind.TRIGGER_PAYLOAD_ROUTE.value, job.deploy_target.namespace),
                )
            rules.append(
                TransitionRule(
                    id=f"backdoor[{name}]",
                    requires=frozenset({_cap(CapabilityKind.JENKINS_EDIT_ACCESS)}),
                    yields=_cap(CapabilityKind.BACKDOORED_IMAGE, name),
                    guard=_backdoor_guard(name),
                    footprint=footprint,
                )
            )

    return sorted(rules, key=lambda rule: rule.id)
