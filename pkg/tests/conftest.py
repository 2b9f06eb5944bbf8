# -*- coding: utf-8 -*-
from typing import Dict

import pytest

from src.cluster.fixture import load_fixture
from src.cluster.model import ClusterState
from src.common.consts.directories import CANONICAL_FIXTURE, POLICIES_DIR
from src.policy.loader import ALL_MITIGATIONS_FILE, load_policy_file, mitigation_policy_files
from src.policy.model import PolicySet
from tests.factories import small_cluster


@pytest.fixture(scope="session")
def canonical_fixture() -> ClusterState:
    return load_fixture(CANONICAL_FIXTURE)


@pytest.fixture
def canonical(canonical_fixture: ClusterState) -> ClusterState:
    return canonical_fixture.copy(deep=True)


@pytest.fixture
def small() -> ClusterState:
    return small_cluster()


@pytest.fixture(scope="session")
def mitigations() -> Dict[str, PolicySet]:
    """The four shipped single-rule policies keyed by rule kind."""
    return {kind: load_policy_file(path) for kind, path in mitigation_policy_files().items()}


@pytest.fixture(scope="session")
def all_mitigations() -> PolicySet:
    return load_policy_file(POLICIES_DIR / ALL_MITIGATIONS_FILE)
