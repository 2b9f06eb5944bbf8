# -*- coding: utf-8 -*-
from enum import Enum
from typing import List, Union

from pydantic import Field, validator
from typing_extensions import Annotated, Literal

from src.common.utils.models import DomainModel


class RuleKind(str, Enum):
    NAMESPACE_SCOPED_SERVICE_ACCOUNTS = "NamespaceScopedServiceAccounts"
    JENKINS_BUILD_EDIT_RESTRICTION = "JenkinsBuildEditRestriction"
    INGRESS_OBJECT_RESTRICTION = "IngressObjectRestriction"
    HOST_PATH_RESTRICTION = "HostPathRestriction"


RULE_KINDS = [kind.value for kind in RuleKind]


class HostPathMode(str, Enum):
    DENY_ALL = "denyAll"
    ADMIN_ONLY = "adminOnly"


class NamespaceScopedServiceAccounts(DomainModel):
    """Service accounts may only create or update resources inside their own namespace."""

    id: str
    kind: Literal["NamespaceScopedServiceAccounts"] = "NamespaceScopedServiceAccounts"


class JenkinsBuildEditRestriction(DomainModel):
    """Only the listed principals may edit build steps."""

    id: str
    kind: Literal["JenkinsBuildEditRestriction"] = "JenkinsBuildEditRestriction"
    allowed_principals: List[str] = []


class IngressObjectRestriction(DomainModel):
    """Only the listed principals may expose the protected services (`namespace/name`)."""

    id: str
    kind: Literal["IngressObjectRestriction"] = "IngressObjectRestriction"
    protected_services: List[str] = []
    allowed_principals: List[str] = []


class HostPathRestriction(DomainModel):
    """Pods carrying hostPath volumes are refused entirely, or for everyone but cluster admins."""

    id: str
    kind: Literal["HostPathRestriction"] = "HostPathRestriction"
    mode: HostPathMode


AnyRule = Union[
    NamespaceScopedServiceAccounts, JenkinsBuildEditRestriction, IngressObjectRestriction, HostPathRestriction
]
PolicyRule = Annotated[AnyRule, Field(discriminator="kind")]


class PolicySet(DomainModel):
    """Ordered mitigation rules; the empty set is the unmitigated baseline."""

    rules: List[PolicyRule] = []

    class Config:
        allow_mutation = False

    @validator("rules")
    def _ids_unique(cls, rules: List[AnyRule]) -> List[AnyRule]:
        seen = set()
        for rule in rules:
            if rule.id in seen:
                raise ValueError(f"duplicate rule id '{rule.id}'")
            seen.add(rule.id)
        return rules

    def with_rule(self, rule: AnyRule) -> "PolicySet":
        return PolicySet(rules=[*self.rules, rule])

    @property
    def rule_ids(self) -> List[str]:
        return [rule.id for rule in self.rules]
