# -*- coding: utf-8 -*-
from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import Field
from typing_extensions import Annotated, Literal

from src.cluster.model import DEFAULT_SERVICE_ACCOUNT, PayloadRoute, Volume
from src.common.utils.models import DomainModel


class ActionKind(str, Enum):
    AUTHENTICATE = "Authenticate"
    KUBECTL_APPLY = "KubectlApply"
    KUBECTL_EXEC = "KubectlExec"
    CHROOT_ESCAPE = "ChrootEscape"
    READ_NODE_KUBECONFIG = "ReadNodeKubeconfig"
    ADD_NODE_PORT = "AddNodePort"
    CONNECT = "Connect"
    CONSUME_TOPIC = "ConsumeTopic"
    PRODUCE_TOPIC = "ProduceTopic"
    JENKINS_LOGIN = "JenkinsLogin"
    EDIT_BUILD_STEP = "EditBuildStep"
    RUN_BUILD = "RunBuild"
    PULL_IMAGE = "PullImage"
    DEPLOY_IMAGE = "DeployImage"
    TRIGGER_PAYLOAD_ROUTE = "TriggerPayloadRoute"
    DELETE_POD = "DeletePod"


ACTION_KINDS = [kind.value for kind in ActionKind]


class PodManifest(DomainModel):
    kind: Literal["Pod"] = "Pod"
    name: str
    namespace: str
    image: str
    node: Optional[str] = None
    service_account: str = DEFAULT_SERVICE_ACCOUNT
    labels: Dict[str, str] = {}
    volumes: List[Volume] = []

    @property
    def has_host_path(self) -> bool:
        return any(v.is_host_path for v in self.volumes)


class ServiceManifest(DomainModel):
    kind: Literal["Service"] = "Service"
    name: str
    namespace: str
    selector: Dict[str, str] = {}
    port: int
    node_port: Optional[int] = None
    cluster_ip: Optional[str] = None


Manifest = Annotated[Union[PodManifest, ServiceManifest], Field(discriminator="kind")]


class Authenticate(DomainModel):
    kind: Literal["Authenticate"] = "Authenticate"
    subject: str


class KubectlApply(DomainModel):
    kind: Literal["KubectlApply"] = "KubectlApply"
    manifest: Manifest

    @property
    def namespace(self) -> str:
        return self.manifest.namespace


class KubectlExec(DomainModel):
    kind: Literal["KubectlExec"] = "KubectlExec"
    pod: str
    namespace: str


class ChrootEscape(DomainModel):
    kind: Literal["ChrootEscape"] = "ChrootEscape"


class ReadNodeKubeconfig(DomainModel):
    kind: Literal["ReadNodeKubeconfig"] = "ReadNodeKubeconfig"


class AddNodePort(DomainModel):
    kind: Literal["AddNodePort"] = "AddNodePort"
    service: str
    namespace: str
    node_port: int


class Connect(DomainModel):
    kind: Literal["Connect"] = "Connect"
    service: str
    namespace: str


class ConsumeTopic(DomainModel):
    kind: Literal["ConsumeTopic"] = "ConsumeTopic"
    service: str
    namespace: str
    topic: str


class ProduceTopic(DomainModel):
    kind: Literal["ProduceTopic"] = "ProduceTopic"
    service: str
    namespace: str
    topic: str
    record: str


class JenkinsLogin(DomainModel):
    kind: Literal["JenkinsLogin"] = "JenkinsLogin"
    user: str


class EditBuildStep(DomainModel):
    kind: Literal["EditBuildStep"] = "EditBuildStep"
    job: str
    step_index: int
    script: str
    payload: Optional[PayloadRoute] = None


class RunBuild(DomainModel):
    kind: Literal["RunBuild"] = "RunBuild"
    job: str


class PullImage(DomainModel):
    kind: Literal["PullImage"] = "PullImage"
    image: str


class DeployImage(DomainModel):
    kind: Literal["DeployImage"] = "DeployImage"
    image: str
    namespace: str
    pod: str
    labels: Dict[str, str] = {}


class TriggerPayloadRoute(DomainModel):
    kind: Literal["TriggerPayloadRoute"] = "TriggerPayloadRoute"
    service: str
    namespace: str
    url_path: str


class DeletePod(DomainModel):
    kind: Literal["DeletePod"] = "DeletePod"
    pod: str
    namespace: str


AnyAction = Union[
    Authenticate,
    KubectlApply,
    KubectlExec,
    ChrootEscape,
    ReadNodeKubeconfig,
    AddNodePort,
    Connect,
    ConsumeTopic,
    ProduceTopic,
    JenkinsLogin,
    EditBuildStep,
    RunBuild,
    PullImage,
    DeployImage,
    TriggerPayloadRoute,
    DeletePod,
]
Action = Annotated[AnyAction, Field(discriminator="kind")]


def target_key(action: AnyAction) -> Optional[str]:
    """The namespace or job an action is aimed at; `None` for actions without a target."""
    if isinstance(action, (EditBuildStep, RunBuild)):
        return action.job
    namespace = getattr(action, "namespace", None)
    return namespace if isinstance(namespace, str) else None
