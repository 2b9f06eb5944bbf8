# -*- coding: utf-8 -*-
from typing import List, Optional

from src.cluster.model import ClusterState, service_account_namespace
from src.cluster.network import reachable
from src.cluster.session import Location, Session
from src.engine.actions import ConsumeTopic, DeletePod, ProduceTopic, TriggerPayloadRoute
from src.scenarios.model import (
    AnyGoal,
    ClusterAdminObtained,
    CrossNamespacePodDeleted,
    ExternallyReachable,
    PayloadRouteServed,
    TopicDataRead,
    TopicDataWritten,
    TraceEntry,
)


def _applied(trace: List[TraceEntry]) -> List[TraceEntry]:
    return [entry for entry in trace if entry.result.applied]


def goal_holds(
    goal: AnyGoal, state: ClusterState, session: Session, trace: List[TraceEntry], home_namespace: Optional[str]
) -> bool:
    """
    Checks one goal against the final world, the final session and the observations collected on the way.

    Args:
        goal (AnyGoal): The predicate.
        state (ClusterState): World after the last step.
        session (Session): Session after the last step.
        trace (List[TraceEntry]): Every executed step with its result.
        home_namespace (Optional[str]): Namespace the attacker started in, `None` for non-namespaced principals.

    Returns:
        bool: Whether the goal holds.
    """
    applied = _applied(trace)

    if isinstance(goal, TopicDataRead):
        return any(isinstance(e.action, ConsumeTopic) and e.action.topic == goal.topic for e in applied)

    if isinstance(goal, TopicDataWritten):
        return any(isinstance(e.action, ProduceTopic) and e.action.topic == goal.topic for e in applied)

    if isinstance(goal, PayloadRouteServed):
        return any(
            isinstance(e.action, TriggerPayloadRoute)
            and e.action.url_path == goal.path
            and e.result.observation is not None
            and e.result.observation.disclosed_file == goal.disclosed_file
            for e in applied
        )

    if isinstance(goal, ExternallyReachable):
        service = state.service(goal.service, goal.namespace)
        return service is not None and reachable(state, Location.external(), service)

    if isinstance(goal, ClusterAdminObtained):
        return session.holds_cluster_admin

    if isinstance(goal, CrossNamespacePodDeleted):
        return any(isinstance(e.action, DeletePod) and e.action.namespace != home_namespace for e in applied)

    return False


def goals_hold(
    goals: List[AnyGoal], state: ClusterState, session: Session, trace: List[TraceEntry], subject: str
) -> bool:
    home_namespace = service_account_namespace(subject)
    return all(goal_holds(goal, state, session, trace, home_namespace) for goal in goals)
