# -*- coding: utf-8 -*-
import json
from pathlib import Path

import pytest

from src.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, main
from src.common.consts.directories import POLICIES_DIR, SCENARIOS_DIR
from src.policy.loader import ALL_MITIGATIONS_FILE, BASELINE_FILE, MITIGATION_FILES
from src.report.report import AnalysisReport, RunReport

pytestmark = pytest.mark.e2e

ALL_MITIGATIONS = str(POLICIES_DIR / ALL_MITIGATIONS_FILE)
HOSTPATH = str(POLICIES_DIR / "hostpath-restriction.yaml")

# Shipped policy file stopping each built-in scenario.
STOPPED_BY = {
    "scenario-1": MITIGATION_FILES["NamespaceScopedServiceAccounts"],
    "scenario-2": MITIGATION_FILES["JenkinsBuildEditRestriction"],
    "scenario-3": MITIGATION_FILES["IngressObjectRestriction"],
    "scenario-4": MITIGATION_FILES["HostPathRestriction"],
}
POLICY_FILES = [BASELINE_FILE, *MITIGATION_FILES.values()]


def test_builtins_are_achieved_at_baseline(capsys: pytest.CaptureFixture) -> None:
    assert main(["run", "--builtin", "--expect", "achieved"]) == EXIT_OK

    out = capsys.readouterr().out
    assert out.count("Achieved") == 4
    assert "[baseline]" in out


def test_all_mitigations_block_the_builtins(capsys: pytest.CaptureFixture) -> None:
    assert main(["run", "--builtin", "--policy", ALL_MITIGATIONS, "--expect", "blocked"]) == EXIT_OK
    assert "Blocked(1, hostpath-restriction" in capsys.readouterr().out


def test_missed_expectation_exits_with_one(capsys: pytest.CaptureFixture) -> None:
    assert main(["run", "--builtin", "--expect", "blocked"]) == EXIT_MISMATCH
    assert "scenario-1: expected blocked, got Achieved" in capsys.readouterr().err


def test_scenario_files_run_like_the_builtins(capsys: pytest.CaptureFixture) -> None:
    assert main(["run", "--scenario", str(SCENARIOS_DIR / "scenario-3.yaml"), "--expect", "achieved"]) == EXIT_OK
    assert "scenario-3" in capsys.readouterr().out


@pytest.mark.parametrize("policy_file", POLICY_FILES)
@pytest.mark.parametrize("scenario_id", sorted(STOPPED_BY))
def test_exit_status_follows_the_verdict_table(
    capsys: pytest.CaptureFixture, scenario_id: str, policy_file: str
) -> None:
    blocked = STOPPED_BY[scenario_id] == policy_file
    argv = [
        "run",
        "--scenario",
        str(SCENARIOS_DIR / f"{scenario_id}.yaml"),
        "--policy",
        str(POLICIES_DIR / policy_file),
        "--expect",
        "achieved",
    ]

    assert main(argv) == (EXIT_MISMATCH if blocked else EXIT_OK)
    assert ("Blocked" in capsys.readouterr().out) is blocked


def test_missing_fixture_is_an_input_error(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    missing = tmp_path / "absent.yaml"
    assert main(["run", "--builtin", "--fixture", str(missing)]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert str(missing) in err


def test_nothing_to_run(capsys: pytest.CaptureFixture) -> None:
    assert main(["run"]) == EXIT_ERROR
    assert "nothing to run" in capsys.readouterr().err


def test_json_report_written_to_file(tmp_path: Path) -> None:
    out = tmp_path / "reports" / "run.json"

    assert main(["run", "--builtin", "--parallel", "--format", "json", "--out", str(out)]) == EXIT_OK

    report = RunReport.parse_file(out)
    assert [v.scenario_id for v in report.verdicts] == ["scenario-1", "scenario-2", "scenario-3", "scenario-4"]
    assert len(report.analyses) == 4
    assert report.all_agree
    assert report.fixture_digest.startswith("sha256:")


def test_verbose_run_prints_traces(capsys: pytest.CaptureFixture) -> None:
    assert main(["run", "--builtin", "--verbose"]) == EXIT_OK
    assert "ChrootEscape" in capsys.readouterr().out


def test_analyze_prints_the_breakout_witness(capsys: pytest.CaptureFixture) -> None:
    assert main(["analyze", "--capability", "CrudIn(developer)", "--capability", "InClusterNetwork"]) == EXIT_OK

    out = capsys.readouterr().out
    assert "exec-shell[developer] -> hostpath-escape[developer:k8s-master] -> node-kubeconfig[k8s-master]" in out


def test_analyze_under_hostpath_restriction(capsys: pytest.CaptureFixture) -> None:
    assert main(["analyze", "--capability", "CrudIn(developer)", "--policy", HOSTPATH, "--format", "json"]) == EXIT_OK

    report = AnalysisReport.parse_raw(capsys.readouterr().out)
    assert "ClusterAdmin" not in report.reached
    assert "ShellInPod(developer)" in report.reached


def test_analyze_without_capabilities(capsys: pytest.CaptureFixture) -> None:
    assert main(["analyze"]) == EXIT_OK
    assert "No capabilities reachable beyond the initial set." in capsys.readouterr().out


def test_analyze_rejects_unknown_capabilities(capsys: pytest.CaptureFixture) -> None:
    assert main(["analyze", "--capability", "Root"]) == EXIT_ERROR
    assert "valid capabilities" in capsys.readouterr().err


def test_analyze_rejects_capabilities_outside_the_fixture(capsys: pytest.CaptureFixture) -> None:
    assert main(["analyze", "--capability", "CrudIn(nowhere)"]) == EXIT_ERROR

    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert "CrudIn(nowhere) names nothing in the fixture" in err


def test_threat_model_text_and_json(capsys: pytest.CaptureFixture) -> None:
    assert main(["threat-model"]) == EXIT_OK
    assert "Account can be used to alter build configs" in capsys.readouterr().out

    assert main(["threat-model", "--format", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert len(document["threats"]) == 6


def test_list_builtins(capsys: pytest.CaptureFixture) -> None:
    assert main(["list-builtins"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "scenario-4" in out and "ClusterAdminObtained, CrossNamespacePodDeleted" in out

    assert main(["list-builtins", "--format", "json"]) == EXIT_OK
    assert [s["id"] for s in json.loads(capsys.readouterr().out)] == [f"scenario-{i}" for i in range(1, 5)]
