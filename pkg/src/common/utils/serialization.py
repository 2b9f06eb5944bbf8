# -*- coding: utf-8 -*-
import hashlib
import json
from datetime import date, datetime
from enum import Enum
from json import JSONEncoder
from pathlib import Path
from typing import Any

from pydantic import BaseModel


class JsonEncoder(JSONEncoder):
    """
    Custom JSON encoder that handles datatypes that are not out-of-the-box supported by the `json` package.
    """

    def default(self, o: Any) -> Any:
        if isinstance(o, datetime) or isinstance(o, date):
            return o.isoformat()

        if isinstance(o, Path):
            return o.as_posix()

        if isinstance(o, Enum):
            return o.value

        if isinstance(o, (set, frozenset)):
            return sorted(o, key=str)

        if isinstance(o, BaseModel):
            return o.dict()

        return super().default(o)


def canonical_json(data: Any) -> str:
    """Serializes `data` with sorted keys and compact separators so equal content yields equal text."""
    return json.dumps(data, cls=JsonEncoder, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_digest(data: Any) -> str:
    """
    Computes a content hash of `data`.

    Args:
        data (Any): A JSON-compatible document, pydantic model or `None`.

    Returns:
        str: `sha256:` followed by the hex digest of the canonical JSON form.
    """
    digest = hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"
