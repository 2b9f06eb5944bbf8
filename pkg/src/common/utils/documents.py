# -*- coding: utf-8 -*-
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple, Type, TypeVar, Union

import yaml
from pydantic import BaseModel, ValidationError

from src.common.exceptions import DocumentParseError, NotFoundError
from src.common.utils.logger import get_logger

_logger = get_logger(__name__)

M = TypeVar("M", bound=BaseModel)
Loc = Sequence[Union[int, str]]


def read_text(path: Path) -> str:
    """Reads a document from disk, raising `NotFoundError` naming the path when it is missing."""
    if not path.is_file():
        raise NotFoundError(f"file not found: {path}")
    _logger.info(f"Loading document: {path}")
    return path.read_text(encoding="utf-8")


def parse_yaml(text: str, source: Optional[str] = None) -> Tuple[Any, Optional[yaml.Node]]:
    """
    Parses YAML text into plain data and its node tree.

    Args:
        text (str): The YAML document.
        source (Optional[str]): Name used in error messages, usually the file path.

    Returns:
        Tuple[Any, Optional[yaml.Node]]: The data and the composed node, `(None, None)` for an empty document.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise DocumentParseError(f"invalid YAML: {e.problem}", source=source, line=line)
    except yaml.YAMLError as e:
        raise DocumentParseError(f"invalid YAML: {e}", source=source)
    return data, node


def locate_line(node: Optional[yaml.Node], loc: Loc) -> Optional[int]:
    """Returns the 1-based line of the deepest node reachable along `loc`."""
    if node is None:
        return None
    line = node.start_mark.line + 1
    current = node
    for part in loc:
        child: Optional[yaml.Node] = None
        if isinstance(current, yaml.MappingNode):
            for key_node, value_node in current.value:
                if key_node.value == str(part):
                    child = value_node
                    break
        elif isinstance(current, yaml.SequenceNode) and isinstance(part, int) and part < len(current.value):
            child = current.value[part]
        if child is None:
            break
        current = child
        line = current.start_mark.line + 1
    return line


def format_loc(loc: Loc) -> str:
    return ".".join(str(part) for part in loc)


def parse_model(model: Type[M], data: Any, node: Optional[yaml.Node], source: Optional[str] = None) -> M:
    """
    Validates plain data against `model`, converting the first validation error into a `DocumentParseError`.

    Args:
        model (Type[M]): The pydantic model to build.
        data (Any): Plain data from `parse_yaml`.
        node (Optional[yaml.Node]): Node tree used to locate the offending line.
        source (Optional[str]): Name used in error messages.

    Returns:
        M: The validated model.
    """
    if not isinstance(data, dict):
        raise DocumentParseError("document must be a mapping", source=source, line=locate_line(node, ()))
    try:
        return model.parse_obj(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = [part for part in error["loc"] if part != "__root__"]
        raise DocumentParseError(error["msg"], source=source, line=locate_line(node, loc), field=format_loc(loc))


def dump_yaml(data: Any) -> str:
    """Block-style YAML with field order preserved and no line folding."""
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False, width=4096, allow_unicode=True)
