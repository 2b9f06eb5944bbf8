# -*- coding: utf-8 -*-
from typing import Set

from src.cluster.model import ClusterState, ResourceKind, Verb
from src.cluster.session import Session
from src.common.exceptions import AuthorizationError


def known_principals(state: ClusterState) -> Set[str]:
    """Every subject the fixture declares: service accounts, users, CI users, node and deploy credentials."""
    principals = {sa.principal for sa in state.service_accounts}
    principals.update(u.subject for u in state.users)
    principals.update(c.subject for c in state.node_credentials.values())
    if state.ci_server is not None:
        principals.update(u.credential.subject for u in state.ci_server.users)
        principals.update(c.subject for c in state.ci_server.deploy_credentials)
    return principals


def authorize(state: ClusterState, session: Session, verb: Verb, kind: ResourceKind, namespace: str) -> bool:
    """
    Answers `kubectl auth can-i <verb> <kind> -n <namespace>` for the session's active credential.

    Args:
        state (ClusterState): The world to consult; not modified.
        session (Session): The session whose credential is checked.
        verb (Verb): The requested verb.
        kind (ResourceKind): The requested resource kind.
        namespace (str): The target namespace.

    Returns:
        bool: True when the credential is a cluster admin or some role rule covers the request.

    Raises:
        AuthorizationError: The credential's subject is not a declared principal.
    """
    credential = session.credential
    if credential.subject not in known_principals(state):
        raise AuthorizationError(f"unknown principal: {credential.subject}")
    if credential.is_cluster_admin:
        return True
    verb_value, kind_value = Verb(verb).value, ResourceKind(kind).value
    return any(
        rule.principal == credential.subject and rule.covers(verb_value, kind_value, namespace)
        for rule in state.role_rules
    )
