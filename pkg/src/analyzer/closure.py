# -*- coding: utf-8 -*-
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from src.analyzer.capabilities import Capability
from src.analyzer.rules import ANONYMOUS, GuardContext, TransitionRule, build_rules
from src.cluster.model import ClusterState, Credential
from src.cluster.session import Session
from src.common.utils.logger import get_logger, timed
from src.policy.model import PolicySet

_logger = get_logger(__name__)

Witness = Tuple[str, ...]


def _merge(witnesses: Iterable[Witness]) -> Witness:
    merged: List[str] = []
    for witness in witnesses:
        merged.extend(rule_id for rule_id in witness if rule_id not in merged)
    return tuple(merged)


def _shorter(candidate: Witness, current: Optional[Witness]) -> bool:
    return current is None or (len(candidate), candidate) < (len(current), current)


class EscalationGraph:
    """
    Capabilities reached from an initial set, the rule instances connecting them and a witness rule path per
    capability. Edges run from every required capability to the yielded one and carry the rule ids.
    """

    def __init__(
        self, initial: FrozenSet[Capability], witnesses: Dict[Capability, Witness], rules: Dict[str, TransitionRule]
    ) -> None:
        self.initial = initial
        self._witnesses = witnesses
        self._rules = rules
        self._g: nx.DiGraph = nx.DiGraph()
        for capability in sorted(witnesses):
            self._g.add_node(capability)
        for rule in rules.values():
            for required in sorted(rule.requires):
                if self._g.has_edge(required, rule.yields):
                    self._g.edges[required, rule.yields]["rules"].append(rule.id)
                else:
                    self._g.add_edge(required, rule.yields, rules=[rule.id])

    @property
    def raw(self) -> nx.DiGraph:
        return self._g

    @property
    def reached(self) -> FrozenSet[Capability]:
        return frozenset(self._witnesses)

    @property
    def gains(self) -> List[Capability]:
        """Reached capabilities that were not given initially, in order."""
        return sorted(self.reached - self.initial)

    def reachable(self, capability: Capability) -> bool:
        return capability in self._witnesses

    def witness(self, capability: Capability) -> List[str]:
        return list(self._witnesses[capability])

    def rule(self, rule_id: str) -> TransitionRule:
        return self._rules[rule_id]

    def chains_correctly(self, capability: Capability) -> bool:
        """Replays the witness of `capability` from the initial set; every rule must find its requirements."""
        held: Set[Capability] = set(self.initial)
        for rule_id in self._witnesses[capability]:
            rule = self._rules[rule_id]
            if not rule.requires <= held:
                return False
            held.add(rule.yields)
        return capability in held

    def to_document(self) -> Dict[str, Any]:
        return {
            "initial": [str(c) for c in sorted(self.initial)],
            "reached": [str(c) for c in sorted(self.reached)],
            "witnesses": {str(c): self.witness(c) for c in self.gains},
        }


@timed
def analyze(
    fixture: ClusterState,
    initial: Iterable[Capability],
    policy: Optional[PolicySet] = None,
    principal: Optional[Credential] = None,
    rules: Optional[List[TransitionRule]] = None,
) -> EscalationGraph:
    """
    Computes the fixed-point closure of the transition rules from `initial`.

    Rules fire once their requirements are held and their guard passes against the fixture and policy. Each
    reached capability keeps the shortest witness found, ties broken by the rule-id sequence.

    Args:
        fixture (ClusterState): The world the guards consult.
        initial (Iterable[Capability]): Capabilities held at the start.
        policy (Optional[PolicySet]): Active mitigations.
        principal (Optional[Credential]): Credential the guards evaluate policy for; anonymous by default.
        rules (Optional[List[TransitionRule]]): Rule instances to use; all of `build_rules(fixture)` by default.

    Returns:
        EscalationGraph: The closure with witnesses.
    """
    context = GuardContext(
        state=fixture, policy=policy or PolicySet(), session=Session.start(principal or ANONYMOUS)
    )
    candidates = sorted(rules if rules is not None else build_rules(fixture), key=lambda r: r.id)
    start = frozenset(initial)
    witnesses: Dict[Capability, Witness] = {capability: () for capability in start}
    guards: Dict[str, bool] = {}
    fired: Dict[str, TransitionRule] = {}

    changed = True
    while changed:
        changed = False
        for rule in candidates:
            if not rule.requires <= witnesses.keys():
                continue
            if rule.id not in guards:
                guards[rule.id] = rule.guard(context)
            if not guards[rule.id]:
                continue
            fired[rule.id] = rule
            candidate = _merge(witnesses[c] for c in sorted(rule.requires)) + (rule.id,)
            if rule.yields in start:
                continue
            if _shorter(candidate, witnesses.get(rule.yields)):
                witnesses[rule.yields] = candidate
                changed = True

    _logger.debug(f"Closure reached {len(witnesses)} capabilities with {len(fired)} rules")
    return EscalationGraph(initial=start, witnesses=witnesses, rules=fired)
