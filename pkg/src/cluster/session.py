# -*- coding: utf-8 -*-
from enum import Enum
from typing import List, Optional

from src.cluster.model import Credential
from src.common.utils.models import DomainModel


class LocationKind(str, Enum):
    EXTERNAL = "external"
    IN_CLUSTER = "inCluster"
    ON_NODE = "onNode"


class Location(DomainModel):
    """Where the attacker's traffic originates: outside the cluster, inside a namespace, or on a node."""

    kind: LocationKind
    namespace: Optional[str] = None
    node: Optional[str] = None

    @classmethod
    def external(cls) -> "Location":
        return cls(kind=LocationKind.EXTERNAL)

    @classmethod
    def in_cluster(cls, namespace: str) -> "Location":
        return cls(kind=LocationKind.IN_CLUSTER, namespace=namespace)

    @classmethod
    def on_node(cls, node: str) -> "Location":
        return cls(kind=LocationKind.ON_NODE, node=node)

    def __str__(self) -> str:
        if self.kind == LocationKind.IN_CLUSTER:
            return f"inCluster({self.namespace})"
        if self.kind == LocationKind.ON_NODE:
            return f"onNode({self.node})"
        return "external"


class ShellKind(str, Enum):
    POD = "pod"
    NODE = "node"


class ShellRef(DomainModel):
    kind: ShellKind
    name: str
    namespace: Optional[str] = None


class Session(DomainModel):
    """An authenticated principal together with the credentials the attacker holds."""

    credential: Credential
    location: Location
    open_shell: Optional[ShellRef] = None
    wallet: List[Credential] = []

    @classmethod
    def start(cls, credential: Credential, location: Optional[Location] = None) -> "Session":
        return cls(credential=credential, location=location or Location.external(), wallet=[credential])

    @property
    def principal(self) -> str:
        return self.credential.subject

    def held(self, subject: str) -> Optional[Credential]:
        return next((c for c in self.wallet if c.subject == subject), None)

    def with_credentials(self, *credentials: Credential) -> "Session":
        wallet = list(self.wallet)
        for credential in credentials:
            if credential not in wallet:
                wallet.append(credential)
        return self.copy(update={"wallet": wallet})

    @property
    def holds_cluster_admin(self) -> bool:
        """True once the active credential or any credential in the wallet is a cluster admin."""
        return self.credential.is_cluster_admin or any(c.is_cluster_admin for c in self.wallet)
