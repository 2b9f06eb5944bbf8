# -*- coding: utf-8 -*-
from typing import FrozenSet, Optional

from src.cluster.model import ClusterState, CredentialLevel, service_account_namespace
from src.cluster.session import Session
from src.common.utils.models import DomainModel
from src.engine.actions import (
    ActionKind,
    AddNodePort,
    AnyAction,
    DeployImage,
    EditBuildStep,
    KubectlApply,
    KubectlExec,
    PodManifest,
)
from src.policy.model import (
    AnyRule,
    HostPathMode,
    HostPathRestriction,
    IngressObjectRestriction,
    JenkinsBuildEditRestriction,
    NamespaceScopedServiceAccounts,
    PolicySet,
)

_NAMESPACE_MUTATIONS = frozenset(
    kind.value
    for kind in (ActionKind.KUBECTL_APPLY, ActionKind.KUBECTL_EXEC, ActionKind.ADD_NODE_PORT, ActionKind.DEPLOY_IMAGE)
)


class PolicyDecision(DomainModel):
    blocked: bool
    rule_id: Optional[str] = None
    reason: Optional[str] = None

    @classmethod
    def passed(cls) -> "PolicyDecision":
        return cls(blocked=False)


def covered_action_kinds(rule: AnyRule) -> FrozenSet[str]:
    """The action kinds, by value, a rule is allowed to block."""
    if isinstance(rule, NamespaceScopedServiceAccounts):
        return _NAMESPACE_MUTATIONS
    if isinstance(rule, JenkinsBuildEditRestriction):
        return frozenset({ActionKind.EDIT_BUILD_STEP.value})
    if isinstance(rule, IngressObjectRestriction):
        return frozenset({ActionKind.ADD_NODE_PORT.value})
    return frozenset({ActionKind.KUBECTL_APPLY.value})


def _blocks(rule: AnyRule, session: Session, action: AnyAction) -> Optional[str]:
    """Reason the rule blocks the action, `None` when it lets it pass."""
    if isinstance(rule, NamespaceScopedServiceAccounts):
        if session.credential.level != CredentialLevel.SERVICE_ACCOUNT:
            return None
        if not isinstance(action, (KubectlApply, KubectlExec, AddNodePort, DeployImage)):
            return None
        home = service_account_namespace(session.principal)
        if action.namespace != home:
            return f"{session.principal} may not modify namespace {action.namespace}"
        return None

    if isinstance(rule, JenkinsBuildEditRestriction):
        if isinstance(action, EditBuildStep) and session.principal not in rule.allowed_principals:
            return f"{session.principal} may not edit build job {action.job}"
        return None

    if isinstance(rule, IngressObjectRestriction):
        if not isinstance(action, AddNodePort):
            return None
        target = f"{action.namespace}/{action.service}"
        if target in rule.protected_services and session.principal not in rule.allowed_principals:
            return f"{session.principal} may not expose {target}"
        return None

    if isinstance(rule, HostPathRestriction):
        if not (isinstance(action, KubectlApply) and isinstance(action.manifest, PodManifest)):
            return None
        if not action.manifest.has_host_path:
            return None
        if rule.mode == HostPathMode.ADMIN_ONLY and session.credential.is_cluster_admin:
            return None
        return f"hostPath volumes refused ({rule.mode})"

    return None


def evaluate(policy: PolicySet, state: ClusterState, session: Session, action: AnyAction) -> PolicyDecision:
    """
    Checks an action against the mitigation rules before anything else looks at it.

    Args:
        policy (PolicySet): Rules in declaration order.
        state (ClusterState): The current world; rules read it but never change it.
        session (Session): The acting session.
        action (AnyAction): The proposed action.

    Returns:
        PolicyDecision: The first blocking rule, or a pass.
    """
    for rule in policy.rules:
        reason = _blocks(rule, session, action)
        if reason is not None:
            return PolicyDecision(blocked=True, rule_id=rule.id, reason=reason)
    return PolicyDecision.passed()
