# -*- coding: utf-8 -*-
from pathlib import Path

import pytest

from src.cluster.fixture import check_fixture, dump_fixture, load_fixture, load_fixture_text, normalize
from src.cluster.model import ClusterState, Pod
from src.cluster.validation import invariant_violations
from src.common.exceptions import ConfigurationError, DocumentParseError, NotFoundError

pytestmark = pytest.mark.unit


def test_canonical_fixture_holds_the_case_study(canonical: ClusterState) -> None:
    assert canonical.namespace_names() == ["developer", "kafka", "apps", "kube-system"]
    assert [n.name for n in canonical.nodes] == ["k8s-master", "k8s-worker-1", "k8s-worker-2"]
    assert canonical.brokers[0].topics["orders"]
    assert canonical.brokers[0].topics["audit-log"] == []
    assert invariant_violations(canonical) == []


def test_every_namespace_gets_a_default_service_account(canonical: ClusterState) -> None:
    for namespace in canonical.namespace_names():
        assert canonical.service_account("default", namespace) is not None


def test_running_containers_follow_scheduled_pods(canonical: ClusterState) -> None:
    worker = canonical.node("k8s-worker-1")
    assert worker is not None
    assert worker.running_containers == ["kafka/strimzi-kafka-0"]


def test_scheduling_prefers_fewest_containers_then_name(canonical: ClusterState) -> None:
    assert canonical.schedule_node() == "k8s-master"
    canonical.pods.append(Pod(name="extra", namespace="apps", node="k8s-master", image="pyapp:1"))
    state = check_fixture(canonical)
    assert state.schedule_node() == "k8s-worker-1"


def test_backing_pods_are_ready_selected_and_ordered(canonical: ClusterState) -> None:
    canonical.pods.append(
        Pod(name="pyapp-0", namespace="apps", node="k8s-master", image="pyapp:1", labels={"app": "pyapp"})
    )
    canonical.pods.append(
        Pod(name="pyapp-1", namespace="apps", node="k8s-master", image="pyapp:1", labels={"app": "pyapp"}, ready=False)
    )
    service = canonical.service("pyapp-service", "apps")
    assert service is not None
    assert [p.name for p in canonical.backing_pods(service)] == ["pyapp", "pyapp-0"]


def test_duplicate_pod_is_a_configuration_error(canonical: ClusterState) -> None:
    canonical.pods.append(canonical.pods[0].copy())
    with pytest.raises(ConfigurationError, match="duplicate pod kafka/strimzi-kafka-0"):
        check_fixture(canonical)


def test_pod_with_unregistered_image_is_rejected(canonical: ClusterState) -> None:
    canonical.pods[0].image = "missing:0"
    assert any("missing:0" in v for v in invariant_violations(normalize(canonical)))


def test_exposed_broker_is_rejected_at_load_time(canonical: ClusterState) -> None:
    broker = canonical.service("strimzi-service", "kafka")
    assert broker is not None
    broker.node_port = 30500
    with pytest.raises(ConfigurationError, match="internalOnly"):
        check_fixture(canonical)


def test_node_without_kubeconfig_is_rejected(canonical: ClusterState) -> None:
    canonical.nodes[0].host_files = {}
    with pytest.raises(ConfigurationError, match="exactly one kubeconfig"):
        check_fixture(canonical)


def test_fixture_survives_a_dump_and_reload(canonical: ClusterState) -> None:
    assert load_fixture_text(dump_fixture(canonical)) == canonical


def test_missing_fixture_file_names_the_path(tmp_path: Path) -> None:
    path = tmp_path / "absent.yaml"
    with pytest.raises(NotFoundError, match="absent.yaml"):
        load_fixture(path)


def test_schema_error_points_at_field_and_line() -> None:
    text = "nodes: []\nnamespaces:\n  - name: a\npods:\n  - name: p\n    namespace: a\n    node: n\n"
    with pytest.raises(DocumentParseError) as info:
        load_fixture_text(text, source="broken.yaml")
    assert info.value.field == "pods.0.image"
    assert info.value.line == 5
    assert str(info.value).startswith("broken.yaml:5: pods.0.image:")


def test_yaml_syntax_error_is_reported_with_its_line() -> None:
    with pytest.raises(DocumentParseError, match="invalid YAML") as info:
        load_fixture_text("nodes: [\n  - a\n", source="bad.yaml")
    assert info.value.line is not None