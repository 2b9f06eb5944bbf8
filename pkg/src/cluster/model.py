# -*- coding: utf-8 -*-
from enum import Enum
from typing import Dict, List, Optional

from pydantic import Field, validator

from src.common.utils.models import DomainModel

CLUSTER_WIDE = "*"
ROOT_DIRECTORY = "/"
KUBECONFIG_FILENAME = "kubecfg-kube-node.yaml"
DEFAULT_SERVICE_ACCOUNT = "default"
NODE_PORT_MIN = 30000
NODE_PORT_MAX = 32767
SERVICE_ACCOUNT_PREFIX = "system:serviceaccount:"


class CredentialLevel(str, Enum):
    USER = "user"
    SERVICE_ACCOUNT = "serviceAccount"
    JENKINS_USER = "jenkinsUser"
    CLUSTER_ADMIN = "clusterAdmin"
    NODE_ROOT = "nodeRoot"


class Verb(str, Enum):
    CREATE = "create"
    GET = "get"
    LIST = "list"
    UPDATE = "update"
    DELETE = "delete"


class ResourceKind(str, Enum):
    POD = "pod"
    SERVICE = "service"
    SECRET = "secret"
    TOPIC = "topic"


class VolumeKind(str, Enum):
    HOST_PATH = "hostPath"
    EPHEMERAL = "ephemeral"


class Exposure(str, Enum):
    INTERNAL_ONLY = "internalOnly"
    NODE_PORT = "nodePort"


def service_account_principal(namespace: str, name: str) -> str:
    return f"{SERVICE_ACCOUNT_PREFIX}{namespace}:{name}"


def service_account_namespace(principal: str) -> Optional[str]:
    """Namespace encoded in a service-account principal, `None` for any other subject."""
    if not principal.startswith(SERVICE_ACCOUNT_PREFIX):
        return None
    namespace, _, _ = principal[len(SERVICE_ACCOUNT_PREFIX) :].partition(":")
    return namespace or None


def in_node_port_range(port: int) -> bool:
    return NODE_PORT_MIN <= port <= NODE_PORT_MAX


class Credential(DomainModel):
    subject: str
    level: CredentialLevel

    class Config:
        frozen = True

    @property
    def is_cluster_admin(self) -> bool:
        return self.level == CredentialLevel.CLUSTER_ADMIN


class Namespace(DomainModel):
    name: str


class ServiceAccount(DomainModel):
    name: str
    namespace: str

    @property
    def principal(self) -> str:
        return service_account_principal(self.namespace, self.name)


class RoleRule(DomainModel):
    """Grants `verbs` on `resource_kinds` to `principal` within one namespace or cluster-wide (`*`)."""

    principal: str
    verbs: List[Verb] = Field(..., min_items=1)
    resource_kinds: List[ResourceKind] = Field(..., min_items=1)
    scope: str

    def covers(self, verb: str, kind: str, namespace: str) -> bool:
        return verb in self.verbs and kind in self.resource_kinds and self.scope in (namespace, CLUSTER_WIDE)


class Volume(DomainModel):
    kind: VolumeKind
    mount_point: str
    host_directory: Optional[str] = None

    @property
    def is_host_path(self) -> bool:
        return self.kind == VolumeKind.HOST_PATH

    @property
    def mounts_host_root(self) -> bool:
        return self.is_host_path and self.host_directory == ROOT_DIRECTORY


class Pod(DomainModel):
    name: str
    namespace: str
    node: str
    image: str
    service_account: str = DEFAULT_SERVICE_ACCOUNT
    labels: Dict[str, str] = {}
    volumes: List[Volume] = []
    ready: bool = True

    @property
    def ref(self) -> str:
        return f"{self.namespace}/{self.name}"

    def matches(self, selector: Dict[str, str]) -> bool:
        return bool(selector) and all(self.labels.get(k) == v for k, v in selector.items())


class Endpoint(DomainModel):
    cluster_ip: str
    port: int
    exposure: Exposure
    node_port: Optional[int] = None


class Service(DomainModel):
    name: str
    namespace: str
    selector: Dict[str, str] = {}
    cluster_ip: str
    port: int
    node_port: Optional[int] = None

    @property
    def ref(self) -> str:
        return f"{self.namespace}/{self.name}"

    @property
    def exposure(self) -> Exposure:
        return Exposure.INTERNAL_ONLY if self.node_port is None else Exposure.NODE_PORT

    def endpoint(self) -> Endpoint:
        return Endpoint(cluster_ip=self.cluster_ip, port=self.port, exposure=self.exposure, node_port=self.node_port)


class Node(DomainModel):
    name: str
    host_files: Dict[str, str] = {}
    running_containers: List[str] = []

    def kubeconfig_paths(self) -> List[str]:
        return [path for path in self.host_files if path.endswith(KUBECONFIG_FILENAME)]


class PayloadRoute(DomainModel):
    """A web route injected into an application that discloses a file of its image."""

    route: str
    disclosed_file: str


class BuildStep(DomainModel):
    script: str
    payload: Optional[PayloadRoute] = None


class DeployTarget(DomainModel):
    namespace: str
    pod: str


class BuildJob(DomainModel):
    source_ref: str
    steps: List[BuildStep] = Field(..., min_items=1)
    output_image_name: str
    last_build: int = 0
    deploy_target: Optional[DeployTarget] = None


class CIUser(DomainModel):
    name: str
    credential: Credential


class CIServer(DomainModel):
    users: List[CIUser] = []
    jobs: Dict[str, BuildJob] = {}
    deploy_credentials: List[Credential] = []

    def user(self, name: str) -> Optional[CIUser]:
        return next((u for u in self.users if u.name == name), None)

    def is_user(self, credential: Credential) -> bool:
        return any(u.credential == credential for u in self.users)


class Image(DomainModel):
    name: str
    tag: str
    files: Dict[str, str] = {}
    payload_routes: Dict[str, str] = {}
    relay: bool = False
    build_number: Optional[int] = None

    @property
    def ref(self) -> str:
        return f"{self.name}:{self.tag}"


class Registry(DomainModel):
    images: List[Image] = []

    def get(self, ref: str) -> Optional[Image]:
        return next((i for i in self.images if i.ref == ref), None)


class SourceRepo(DomainModel):
    name: str
    files: Dict[str, str] = {}


class ServiceRef(DomainModel):
    name: str
    namespace: str

    @property
    def ref(self) -> str:
        return f"{self.namespace}/{self.name}"


class BrokerApp(DomainModel):
    service: ServiceRef
    topics: Dict[str, List[str]] = {}


class ClusterState(DomainModel):
    """The complete simulated world: cluster resources plus the CI server, registry, repository and brokers."""

    nodes: List[Node]
    namespaces: List[Namespace]
    pods: List[Pod] = []
    services: List[Service] = []
    service_accounts: List[ServiceAccount] = []
    role_rules: List[RoleRule] = []
    users: List[Credential] = []
    node_credentials: Dict[str, Credential] = {}
    ci_server: Optional[CIServer] = None
    registry: Registry = Registry()
    source_repo: Optional[SourceRepo] = None
    brokers: List[BrokerApp] = []
    clock: int = 0

    @validator("clock")
    def _clock_not_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("clock must not be negative")
        return value

    def namespace_names(self) -> List[str]:
        return [n.name for n in self.namespaces]

    def node(self, name: str) -> Optional[Node]:
        return next((n for n in self.nodes if n.name == name), None)

    def pod(self, name: str, namespace: str) -> Optional[Pod]:
        return next((p for p in self.pods if p.name == name and p.namespace == namespace), None)

    def service(self, name: str, namespace: str) -> Optional[Service]:
        return next((s for s in self.services if s.name == name and s.namespace == namespace), None)

    def service_account(self, name: str, namespace: str) -> Optional[ServiceAccount]:
        return next((a for a in self.service_accounts if a.name == name and a.namespace == namespace), None)

    def broker_for(self, name: str, namespace: str) -> Optional[BrokerApp]:
        return next((b for b in self.brokers if b.service.name == name and b.service.namespace == namespace), None)

    def backing_pods(self, service: Service) -> List[Pod]:
        """Ready pods selected by `service`, ordered by name."""
        pods = [p for p in self.pods if p.namespace == service.namespace and p.ready and p.matches(service.selector)]
        return sorted(pods, key=lambda p: p.name)

    def schedule_node(self) -> str:
        """Node for a pod without an explicit node: fewest running containers, then name."""
        return min(self.nodes, key=lambda n: (len(n.running_containers), n.name)).name

    def admin_credential(self) -> Optional[Credential]:
        admins = [c for _, c in sorted(self.node_credentials.items()) if c.is_cluster_admin]
        return admins[0] if admins else None
