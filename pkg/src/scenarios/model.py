# -*- coding: utf-8 -*-
from enum import Enum
from typing import List, Optional, Union

from pydantic import Field, root_validator
from typing_extensions import Annotated, Literal

from src.cluster.session import Location, ShellRef
from src.common.utils.models import DomainModel
from src.engine.actions import Action
from src.engine.results import ActionResult


class GoalKind(str, Enum):
    TOPIC_DATA_READ = "TopicDataRead"
    PAYLOAD_ROUTE_SERVED = "PayloadRouteServed"
    EXTERNALLY_REACHABLE = "ExternallyReachable"
    CLUSTER_ADMIN_OBTAINED = "ClusterAdminObtained"
    CROSS_NAMESPACE_POD_DELETED = "CrossNamespacePodDeleted"
    TOPIC_DATA_WRITTEN = "TopicDataWritten"


GOAL_KINDS = [kind.value for kind in GoalKind]


class TopicDataRead(DomainModel):
    kind: Literal["TopicDataRead"] = "TopicDataRead"
    topic: str


class PayloadRouteServed(DomainModel):
    kind: Literal["PayloadRouteServed"] = "PayloadRouteServed"
    path: str
    disclosed_file: str


class ExternallyReachable(DomainModel):
    kind: Literal["ExternallyReachable"] = "ExternallyReachable"
    service: str
    namespace: str


class ClusterAdminObtained(DomainModel):
    kind: Literal["ClusterAdminObtained"] = "ClusterAdminObtained"


class CrossNamespacePodDeleted(DomainModel):
    kind: Literal["CrossNamespacePodDeleted"] = "CrossNamespacePodDeleted"


class TopicDataWritten(DomainModel):
    kind: Literal["TopicDataWritten"] = "TopicDataWritten"
    topic: str


AnyGoal = Union[
    TopicDataRead,
    PayloadRouteServed,
    ExternallyReachable,
    ClusterAdminObtained,
    CrossNamespacePodDeleted,
    TopicDataWritten,
]
GoalPredicate = Annotated[AnyGoal, Field(discriminator="kind")]


class Prerequisite(DomainModel):
    """The attacker's foothold: one credential subject, where the attacker stands, and an optional open shell."""

    description: str
    subject: str
    location: Location = Location.external()
    open_shell: Optional[ShellRef] = None


class Scenario(DomainModel):
    id: str
    title: str
    prerequisite: Prerequisite
    steps: List[Action] = Field(..., min_items=1)
    goal: List[GoalPredicate] = Field(..., min_items=1)


class OutcomeKind(str, Enum):
    ACHIEVED = "Achieved"
    BLOCKED = "Blocked"
    DENIED = "Denied"
    FAILED = "Failed"


GOAL_NOT_SATISFIED = "goal not satisfied"


class ScenarioOutcome(DomainModel):
    kind: OutcomeKind
    step_index: Optional[int] = None
    policy_id: Optional[str] = None
    reason: Optional[str] = None

    @classmethod
    def achieved(cls) -> "ScenarioOutcome":
        return cls(kind=OutcomeKind.ACHIEVED)

    def __str__(self) -> str:
        if self.kind == OutcomeKind.ACHIEVED:
            return OutcomeKind.ACHIEVED.value
        details = [str(self.step_index) if self.step_index is not None else "-"]
        details.extend(part for part in (self.policy_id, self.reason) if part)
        return f"{self.kind}({', '.join(details)})"


class TraceEntry(DomainModel):
    action: Action
    result: ActionResult


class ScenarioVerdict(DomainModel):
    scenario_id: str
    outcome: ScenarioOutcome
    trace: List[TraceEntry] = []

    @root_validator(skip_on_failure=True)
    def _outcome_matches_trace(cls, values: dict) -> dict:
        outcome: ScenarioOutcome = values["outcome"]
        trace: List[TraceEntry] = values["trace"]
        first_failure = next((i for i, entry in enumerate(trace) if not entry.result.applied), None)
        if outcome.kind != OutcomeKind.ACHIEVED and outcome.step_index is not None:
            if first_failure != outcome.step_index:
                raise ValueError("outcome step index must point at the first non-applied trace entry")
        elif first_failure is not None:
            raise ValueError("a trace with a non-applied entry needs an outcome pointing at it")
        return values

    @property
    def achieved(self) -> bool:
        return self.outcome.kind == OutcomeKind.ACHIEVED

    @property
    def blocked(self) -> bool:
        return self.outcome.kind == OutcomeKind.BLOCKED
