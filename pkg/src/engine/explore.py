# -*- coding: utf-8 -*-
from collections import deque
from typing import Callable, Deque, List, Optional, Set, Tuple

from src.cluster.model import ClusterState
from src.cluster.session import Session
from src.common.utils.logger import get_logger, timed
from src.common.utils.models import DomainModel
from src.common.utils.serialization import canonical_digest
from src.engine.actions import Action, AnyAction
from src.engine.alphabet import action_alphabet
from src.engine.engine import apply_action
from src.policy.model import PolicySet

_logger = get_logger(__name__)

Predicate = Callable[[ClusterState, Session], bool]


class ExplorationResult(DomainModel):
    visited: int
    depth_reached: int
    witness: Optional[List[Action]] = None

    @property
    def found(self) -> bool:
        return self.witness is not None


def session_holds_cluster_admin(state: ClusterState, session: Session) -> bool:
    return session.holds_cluster_admin


def _fingerprint(state: ClusterState, session: Session) -> str:
    return canonical_digest({"state": state.dict(exclude={"clock"}), "session": session.dict()})


@timed
def explore(
    state: ClusterState,
    session: Session,
    predicate: Predicate,
    max_depth: int = 10,
    policy: Optional[PolicySet] = None,
    alphabet: Optional[List[AnyAction]] = None,
) -> ExplorationResult:
    """
    Breadth-first search over action sequences of at most `max_depth` steps.

    Worlds that differ only in their clock are treated as the same node, so the search terminates as soon
    as no action produces anything new.

    Args:
        state (ClusterState): The start world.
        session (Session): The start session.
        predicate (Predicate): Target condition on (state, session).
        max_depth (int): Longest sequence to try.
        policy (Optional[PolicySet]): Active mitigations.
        alphabet (Optional[List[AnyAction]]): Actions to try; defaults to `action_alphabet(state)`.

    Returns:
        ExplorationResult: The shortest witness sequence if one exists, with search statistics.
    """
    actions = alphabet if alphabet is not None else action_alphabet(state)
    if predicate(state, session):
        return ExplorationResult(visited=1, depth_reached=0, witness=[])

    seen: Set[str] = {_fingerprint(state, session)}
    frontier: Deque[Tuple[ClusterState, Session, List[AnyAction]]] = deque([(state, session, [])])
    depth_reached = 0
    while frontier:
        current, current_session, path = frontier.popleft()
        if len(path) >= max_depth:
            continue
        for action in actions:
            successor, result = apply_action(current, current_session, action, policy)
            if not result.applied:
                continue
            assert result.session is not None
            key = _fingerprint(successor, result.session)
            if key in seen:
                continue
            seen.add(key)
            trail = [*path, action]
            depth_reached = max(depth_reached, len(trail))
            if predicate(successor, result.session):
                _logger.info(f"Witness found after visiting {len(seen)} states")
                return ExplorationResult(visited=len(seen), depth_reached=depth_reached, witness=trail)
            frontier.append((successor, result.session, trail))

    _logger.info(f"Search exhausted {len(seen)} states up to depth {depth_reached}")
    return ExplorationResult(visited=len(seen), depth_reached=depth_reached)
