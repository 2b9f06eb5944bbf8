# -*- coding: utf-8 -*-
from pathlib import Path
from typing import Dict, Optional

from src.common.consts.directories import POLICIES_DIR
from src.common.exceptions import DocumentParseError
from src.common.utils.documents import dump_yaml, locate_line, parse_model, parse_yaml, read_text
from src.policy.model import RULE_KINDS, PolicySet, RuleKind

ALL_MITIGATIONS_FILE = "all-mitigations.yaml"
BASELINE_FILE = "baseline.yaml"

MITIGATION_FILES: Dict[str, str] = {
    RuleKind.NAMESPACE_SCOPED_SERVICE_ACCOUNTS.value: "namespace-scoped-service-accounts.yaml",
    RuleKind.JENKINS_BUILD_EDIT_RESTRICTION.value: "jenkins-build-edit-restriction.yaml",
    RuleKind.INGRESS_OBJECT_RESTRICTION.value: "ingress-object-restriction.yaml",
    RuleKind.HOST_PATH_RESTRICTION.value: "hostpath-restriction.yaml",
}


def load_policy(text: str, source: Optional[str] = None) -> PolicySet:
    """
    Parses a policy document; an empty document is the baseline.

    Args:
        text (str): YAML with a top-level `rules` list.
        source (Optional[str]): Name used in error messages.

    Returns:
        PolicySet: The rules in declaration order.

    Raises:
        DocumentParseError: A non-list `rules`, unknown rule kind, duplicate rule id or any other schema violation.
    """
    data, node = parse_yaml(text, source=source)
    if data is None:
        return PolicySet()
    rules = data.get("rules") if isinstance(data, dict) else None
    if rules is not None and not isinstance(rules, list):
        raise DocumentParseError(
            f"rules must be a list, got {type(rules).__name__}",
            source=source,
            line=locate_line(node, ["rules"]),
            field="rules",
        )
    for index, rule in enumerate(rules or []):
        kind = rule.get("kind") if isinstance(rule, dict) else None
        if kind not in RULE_KINDS:
            raise DocumentParseError(
                f"unknown rule kind '{kind}'; valid kinds: {', '.join(RULE_KINDS)}",
                source=source,
                line=locate_line(node, ["rules", index, "kind"]),
                field=f"rules.{index}.kind",
            )
    return parse_model(PolicySet, data, node, source=source)


def load_policy_file(path: Path) -> PolicySet:
    return load_policy(read_text(path), source=str(path))


def dump_policy(policy: PolicySet) -> str:
    return dump_yaml(policy.to_document())


def mitigation_policy_files(policies_dir: Path = POLICIES_DIR) -> Dict[str, Path]:
    """The four shipped single-rule mitigations keyed by rule kind."""
    return {kind: policies_dir / filename for kind, filename in MITIGATION_FILES.items()}
