# -*- coding: utf-8 -*-
from pathlib import Path
from random import Random
from typing import Dict, List

import pytest

from src.cluster.model import ClusterState
from src.cluster.rbac import known_principals
from src.cluster.session import Session
from src.common.exceptions import DocumentParseError, NotFoundError
from src.engine.actions import ConsumeTopic, KubectlApply, PodManifest
from src.engine.alphabet import action_alphabet
from src.policy.evaluate import covered_action_kinds, evaluate
from src.policy.loader import MITIGATION_FILES, dump_policy, load_policy, load_policy_file
from src.policy.model import (
    RULE_KINDS,
    AnyRule,
    HostPathMode,
    HostPathRestriction,
    IngressObjectRestriction,
    JenkinsBuildEditRestriction,
    NamespaceScopedServiceAccounts,
    PolicySet,
)
from src.scenarios.builtins import namespace_breakout
from tests.factories import random_policy, session_for

pytestmark = pytest.mark.unit


def _every_rule() -> List[AnyRule]:
    return [
        NamespaceScopedServiceAccounts(id="ns"),
        JenkinsBuildEditRestriction(id="jenkins"),
        IngressObjectRestriction(id="ingress", protected_services=["data/queue-svc", "team/web-ui"]),
        HostPathRestriction(id="hostpath-deny", mode=HostPathMode.DENY_ALL),
        HostPathRestriction(id="hostpath-admin", mode=HostPathMode.ADMIN_ONLY),
    ]


def _breakout_pod() -> KubectlApply:
    step = namespace_breakout().steps[1]
    assert isinstance(step, KubectlApply)
    return step


def test_hostpath_pod_is_blocked_under_deny_all(canonical: ClusterState, mitigations: Dict[str, PolicySet]) -> None:
    session = session_for(canonical, "system:serviceaccount:developer:crud-sa")
    decision = evaluate(mitigations["HostPathRestriction"], canonical, session, _breakout_pod())

    assert decision.blocked
    assert decision.rule_id == "hostpath-restriction"


def test_cluster_admin_passes_admin_only(canonical: ClusterState) -> None:
    policy = PolicySet(rules=[HostPathRestriction(id="hostpath", mode=HostPathMode.ADMIN_ONLY)])
    assert not evaluate(policy, canonical, session_for(canonical, "kubernetes-admin"), _breakout_pod()).blocked
    crud = session_for(canonical, "system:serviceaccount:developer:crud-sa")
    assert evaluate(policy, canonical, crud, _breakout_pod()).blocked


def test_reads_pass_every_rule(canonical: ClusterState) -> None:
    action = ConsumeTopic(service="strimzi-service", namespace="kafka", topic="orders")
    session = session_for(canonical, "system:serviceaccount:developer:deployer")
    for rule in _every_rule():
        assert not evaluate(PolicySet(rules=[rule]), canonical, session, action).blocked


def test_namespace_rule_only_concerns_service_accounts(canonical: ClusterState) -> None:
    policy = PolicySet(rules=[NamespaceScopedServiceAccounts(id="ns")])
    action = KubectlApply(manifest=PodManifest(name="p", namespace="kafka", image="alpine:3.18"))

    def blocked(subject: str) -> bool:
        return evaluate(policy, canonical, session_for(canonical, subject), action).blocked

    assert blocked("system:serviceaccount:developer:deployer")
    assert not blocked("system:serviceaccount:kafka:ingress-editor")
    assert not blocked("kubernetes-admin")


def test_first_blocking_rule_wins(canonical: ClusterState) -> None:
    policy = PolicySet(
        rules=[
            NamespaceScopedServiceAccounts(id="first"),
            HostPathRestriction(id="second", mode=HostPathMode.DENY_ALL),
        ]
    )
    session = session_for(canonical, "system:serviceaccount:developer:deployer")
    pod = _breakout_pod().manifest.copy(update={"namespace": "kafka"})
    assert evaluate(policy, canonical, session, KubectlApply(manifest=pod)).rule_id == "first"


def test_blocks_stay_within_each_rules_contract(small: ClusterState) -> None:
    sessions = [
        session_for(small, subject) for subject in ("guest", "system:serviceaccount:team:reader", "kube-node")
    ]
    for rule in _every_rule():
        policy = PolicySet(rules=[rule])
        covered = covered_action_kinds(rule)
        for action in action_alphabet(small):
            for session in sessions:
                if evaluate(policy, small, session, action).blocked:
                    assert action.kind in covered, f"{rule.id} blocked {action.kind}"


def test_adding_a_rule_never_lifts_a_block(canonical: ClusterState) -> None:
    rng = Random(2024)
    actions = action_alphabet(canonical)
    subjects = ["developer", "kubernetes-admin", "dev-jenkins", "kube-node"]
    subjects.extend(sa.principal for sa in canonical.service_accounts)
    sessions: List[Session] = [session_for(canonical, subject) for subject in subjects]
    extras = _every_rule()

    for _ in range(1000):
        policy = random_policy(rng)
        action, session = rng.choice(actions), rng.choice(sessions)
        extra = rng.choice(extras).copy(update={"id": "extra"})

        if evaluate(policy, canonical, session, action).blocked:
            assert evaluate(policy.with_rule(extra), canonical, session, action).blocked


class TestLoader:
    def test_empty_document_is_the_baseline(self) -> None:
        assert load_policy("") == PolicySet()
        assert load_policy("# nothing\n") == PolicySet()

    def test_shipped_mitigations_hold_one_rule_each(self, mitigations: Dict[str, PolicySet]) -> None:
        assert sorted(mitigations) == sorted(RULE_KINDS)
        for kind, policy in mitigations.items():
            assert [rule.kind for rule in policy.rules] == [kind]

    def test_all_mitigations_holds_every_kind(self, all_mitigations: PolicySet) -> None:
        assert [rule.kind for rule in all_mitigations.rules] == list(MITIGATION_FILES)

    def test_duplicate_rule_id_is_a_parse_error(self) -> None:
        rule = "  - id: a\n    kind: NamespaceScopedServiceAccounts\n"
        text = "rules:\n" + rule + rule
        with pytest.raises(DocumentParseError, match="duplicate rule id 'a'"):
            load_policy(text)

    def test_unknown_rule_kind_lists_the_valid_ones(self) -> None:
        with pytest.raises(DocumentParseError) as info:
            load_policy("rules:\n  - id: a\n    kind: Firewall\n", source="p.yaml")
        assert info.value.field == "rules.0.kind"
        assert info.value.line == 3
        for kind in RULE_KINDS:
            assert kind in info.value.message

    @pytest.mark.parametrize("rules", ["hostpath-restriction", "{id: a}", "3"])
    def test_rules_must_be_a_list(self, rules: str) -> None:
        with pytest.raises(DocumentParseError, match="rules must be a list") as info:
            load_policy(f"# scalar rules\nrules: {rules}\n", source="p.yaml")
        assert info.value.field == "rules"
        assert info.value.line == 2

    def test_shipped_policies_name_only_fixture_entities(
        self, canonical: ClusterState, mitigations: Dict[str, PolicySet], all_mitigations: PolicySet
    ) -> None:
        principals = known_principals(canonical)
        services = {service.ref for service in canonical.services}
        for policy in [*mitigations.values(), all_mitigations]:
            for rule in policy.rules:
                assert set(getattr(rule, "allowed_principals", [])) <= principals, rule.id
                assert set(getattr(rule, "protected_services", [])) <= services, rule.id

    def test_policy_survives_a_dump_and_reload(self, all_mitigations: PolicySet) -> None:
        assert load_policy(dump_policy(all_mitigations)) == all_mitigations

    def test_missing_file_names_the_path(self, tmp_path: Path) -> None:
        with pytest.raises(NotFoundError, match="gone.yaml"):
            load_policy_file(tmp_path / "gone.yaml")
