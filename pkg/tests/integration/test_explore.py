# -*- coding: utf-8 -*-
from typing import List

import pytest

from src.cluster.model import ROOT_DIRECTORY, ClusterState, Volume, VolumeKind
from src.engine.actions import AnyAction, ChrootEscape, KubectlApply, KubectlExec, PodManifest, ReadNodeKubeconfig
from src.engine.explore import explore, session_holds_cluster_admin
from src.policy.model import HostPathMode, HostPathRestriction, PolicySet
from tests.factories import session_for

pytestmark = pytest.mark.integration

CRUD_SA = "system:serviceaccount:developer:crud-sa"


def _breakout_alphabet() -> List[AnyAction]:
    volume = Volume(kind=VolumeKind.HOST_PATH, mount_point="/host", host_directory=ROOT_DIRECTORY)
    pod = PodManifest(name="probe", namespace="developer", image="alpine:3.18", volumes=[volume])
    return [
        ReadNodeKubeconfig(),
        ChrootEscape(),
        KubectlExec(pod="probe", namespace="developer"),
        KubectlApply(manifest=pod),
    ]


def test_guest_never_reaches_cluster_admin(small: ClusterState) -> None:
    result = explore(small, session_for(small, "guest"), session_holds_cluster_admin, max_depth=10)

    assert not result.found
    assert result.visited > 1


def test_reader_cannot_escape_either(small: ClusterState) -> None:
    reader = session_for(small, "system:serviceaccount:team:reader")
    assert not explore(small, reader, session_holds_cluster_admin, max_depth=10).found


def test_crud_account_finds_the_breakout(canonical: ClusterState) -> None:
    session = session_for(canonical, CRUD_SA)
    result = explore(canonical, session, session_holds_cluster_admin, alphabet=_breakout_alphabet())

    assert result.found
    assert [action.kind for action in result.witness or []] == [
        "KubectlApply",
        "KubectlExec",
        "ChrootEscape",
        "ReadNodeKubeconfig",
    ]


def test_hostpath_restriction_closes_the_breakout(canonical: ClusterState) -> None:
    policy = PolicySet(rules=[HostPathRestriction(id="hostpath", mode=HostPathMode.DENY_ALL)])
    session = session_for(canonical, CRUD_SA)

    result = explore(canonical, session, session_holds_cluster_admin, policy=policy, alphabet=_breakout_alphabet())

    assert not result.found
    assert result.visited == 1


def test_predicate_holding_at_the_start_yields_an_empty_witness(canonical: ClusterState) -> None:
    result = explore(canonical, session_for(canonical, "kube-node"), session_holds_cluster_admin)
    assert result.found and result.witness == []
