# -*- coding: utf-8 -*-
import inspect
import re
from typing import Callable

import pytest
import yaml

from src.cluster.model import ClusterState
from src.common.exceptions import ConfigurationError, DocumentParseError
from src.engine.actions import ACTION_KINDS, Authenticate
from src.engine.results import ActionResult
from src.scenarios.builtins import broker_exposure, build_backdoor, builtin_scenarios, namespace_breakout, topic_siphon
from src.scenarios.loader import builtin_scenario_path, dump_scenario, load_scenario, load_scenario_file
from src.scenarios.model import (
    ExternallyReachable,
    OutcomeKind,
    PayloadRouteServed,
    Prerequisite,
    Scenario,
    ScenarioOutcome,
    ScenarioVerdict,
    TraceEntry,
)
from src.scenarios.runner import resolve_credential, run_scenario

pytestmark = pytest.mark.unit


def test_there_are_four_builtins_with_distinct_ids() -> None:
    scenarios = builtin_scenarios()
    assert [s.id for s in scenarios] == ["scenario-1", "scenario-2", "scenario-3", "scenario-4"]


def test_backdoor_goal_is_the_hack_route() -> None:
    assert builtin_scenarios()[1].goal == [PayloadRouteServed(path="/hack", disclosed_file="requirements.txt")]


def test_exposure_goal_is_the_broker_service() -> None:
    assert builtin_scenarios()[2].goal == [ExternallyReachable(service="strimzi-service", namespace="kafka")]


def test_breakout_needs_both_goals() -> None:
    assert [goal.kind for goal in builtin_scenarios()[3].goal] == ["ClusterAdminObtained", "CrossNamespacePodDeleted"]


def test_serialized_scenario_reloads_equal() -> None:
    scenario = topic_siphon()
    assert load_scenario(dump_scenario(scenario)) == scenario


@pytest.mark.parametrize("scenario", builtin_scenarios(), ids=lambda s: s.id)
def test_shipped_files_match_the_builtins(scenario: Scenario) -> None:
    assert load_scenario_file(builtin_scenario_path(scenario.id)) == scenario


@pytest.mark.parametrize("scenario", builtin_scenarios(), ids=lambda s: s.id)
def test_shipped_files_are_the_dumped_builtins(scenario: Scenario) -> None:
    assert builtin_scenario_path(scenario.id).read_text(encoding="utf-8") == dump_scenario(scenario)


@pytest.mark.parametrize("build", [topic_siphon, build_backdoor, broker_exposure, namespace_breakout])
def test_every_step_cites_its_command_line(build: Callable[[], Scenario]) -> None:
    cited = re.findall(r"#.*\(lines? \d+(?:-\d+)?\)$", inspect.getsource(build), flags=re.MULTILINE)
    assert len(cited) == len(build().steps)


def test_missing_goal_is_named() -> None:
    document = topic_siphon().to_document()
    del document["goal"]
    with pytest.raises(DocumentParseError) as info:
        load_scenario(yaml.safe_dump(document, sort_keys=False), source="s.yaml")
    assert info.value.field == "goal"


def test_unknown_action_kind_lists_the_valid_ones() -> None:
    document = topic_siphon().to_document()
    document["steps"][2] = {"kind": "SshInto", "host": "k8s-master"}
    with pytest.raises(DocumentParseError) as info:
        load_scenario(yaml.safe_dump(document, sort_keys=False))
    assert info.value.field == "steps.2.kind"
    assert all(kind in info.value.message for kind in ACTION_KINDS)


def test_empty_steps_are_rejected() -> None:
    document = topic_siphon().to_document()
    document["steps"] = []
    with pytest.raises(DocumentParseError, match="steps"):
        load_scenario(yaml.safe_dump(document, sort_keys=False))


def test_absent_prerequisite_credential_is_a_configuration_error(canonical: ClusterState) -> None:
    scenario = topic_siphon().copy(update={"prerequisite": Prerequisite(description="nobody", subject="mallory")})
    with pytest.raises(ConfigurationError, match="mallory"):
        run_scenario(canonical, scenario)


def test_node_credentials_resolve_by_subject(canonical: ClusterState) -> None:
    assert resolve_credential(canonical, "kube-node").is_cluster_admin


class TestVerdict:
    def test_blocked_outcome_renders_index_rule_and_reason(self) -> None:
        outcome = ScenarioOutcome(kind=OutcomeKind.BLOCKED, step_index=1, policy_id="hostpath", reason="refused")
        assert str(outcome) == "Blocked(1, hostpath, refused)"
        assert str(ScenarioOutcome.achieved()) == "Achieved"

    def test_outcome_must_point_at_the_first_refused_step(self) -> None:
        trace = [
            TraceEntry(action=Authenticate(subject="a"), result=ActionResult.denied("no")),
        ]
        with pytest.raises(ValueError):
            ScenarioVerdict(scenario_id="x", outcome=ScenarioOutcome.achieved(), trace=trace)
        with pytest.raises(ValueError):
            ScenarioVerdict(
                scenario_id="x", outcome=ScenarioOutcome(kind=OutcomeKind.DENIED, step_index=3), trace=trace
            )
        verdict = ScenarioVerdict(
            scenario_id="x", outcome=ScenarioOutcome(kind=OutcomeKind.DENIED, step_index=0), trace=trace
        )
        assert not verdict.achieved and not verdict.blocked
