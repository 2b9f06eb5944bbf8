# -*- coding: utf-8 -*-
from pathlib import Path
from typing import Any, List, Optional

import yaml

from src.common.consts.directories import SCENARIOS_DIR
from src.common.exceptions import DocumentParseError
from src.common.utils.documents import dump_yaml, locate_line, parse_model, parse_yaml, read_text
from src.engine.actions import ACTION_KINDS
from src.scenarios.model import GOAL_KINDS, Scenario


def _check_kinds(items: Any, field: str, valid: List[str], node: Optional[yaml.Node], source: Optional[str]) -> None:
    if not isinstance(items, list):
        return
    for index, item in enumerate(items):
        kind = item.get("kind") if isinstance(item, dict) else None
        if kind not in valid:
            raise DocumentParseError(
                f"unknown kind '{kind}'; valid kinds: {', '.join(valid)}",
                source=source,
                line=locate_line(node, [field, index, "kind"]),
                field=f"{field}.{index}.kind",
            )


def load_scenario(text: str, source: Optional[str] = None) -> Scenario:
    """
    Parses a scenario document.

    Args:
        text (str): YAML with `id`, `title`, `prerequisite`, `steps` and `goal`.
        source (Optional[str]): Name used in error messages.

    Returns:
        Scenario: The validated scenario.

    Raises:
        DocumentParseError: Syntax errors, missing fields, or unknown action or goal kinds.
    """
    data, node = parse_yaml(text, source=source)
    if isinstance(data, dict):
        _check_kinds(data.get("steps"), "steps", ACTION_KINDS, node, source)
        _check_kinds(data.get("goal"), "goal", GOAL_KINDS, node, source)
    return parse_model(Scenario, data, node, source=source)


def load_scenario_file(path: Path) -> Scenario:
    return load_scenario(read_text(path), source=str(path))


def dump_scenario(scenario: Scenario) -> str:
    return dump_yaml(scenario.to_document())


def builtin_scenario_path(scenario_id: str, scenarios_dir: Path = SCENARIOS_DIR) -> Path:
    return scenarios_dir / f"{scenario_id}.yaml"
