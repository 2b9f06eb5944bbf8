# -*- coding: utf-8 -*-
from enum import Enum
from typing import List, Optional

from pydantic import root_validator

from src.cluster.model import Credential, Endpoint
from src.cluster.session import Session
from src.common.utils.models import DomainModel


class ActionStatus(str, Enum):
    APPLIED = "Applied"
    DENIED_RBAC = "DeniedRBAC"
    BLOCKED_POLICY = "BlockedPolicy"
    FAILED_PRECONDITION = "FailedPrecondition"


class Observation(DomainModel):
    """Data an applied action hands back to the attacker."""

    records: Optional[List[str]] = None
    content: Optional[str] = None
    disclosed_file: Optional[str] = None
    credential: Optional[Credential] = None
    endpoint: Optional[Endpoint] = None
    image: Optional[str] = None
    node: Optional[str] = None
    pod: Optional[str] = None
    containers: Optional[List[str]] = None


class ActionResult(DomainModel):
    status: ActionStatus
    reason: Optional[str] = None
    policy_id: Optional[str] = None
    observation: Optional[Observation] = None
    session: Optional[Session] = None

    @root_validator(skip_on_failure=True)
    def _payload_only_when_applied(cls, values: dict) -> dict:
        if values.get("status") != ActionStatus.APPLIED and (values.get("observation") or values.get("session")):
            raise ValueError("observation and session are only carried by applied results")
        return values

    @property
    def applied(self) -> bool:
        return self.status == ActionStatus.APPLIED

    @classmethod
    def applied_with(cls, session: Session, observation: Optional[Observation] = None) -> "ActionResult":
        return cls(status=ActionStatus.APPLIED, session=session, observation=observation)

    @classmethod
    def denied(cls, reason: str) -> "ActionResult":
        return cls(status=ActionStatus.DENIED_RBAC, reason=reason)

    @classmethod
    def blocked(cls, policy_id: str, reason: Optional[str] = None) -> "ActionResult":
        return cls(status=ActionStatus.BLOCKED_POLICY, policy_id=policy_id, reason=reason)

    @classmethod
    def failed(cls, reason: str) -> "ActionResult":
        return cls(status=ActionStatus.FAILED_PRECONDITION, reason=reason)
