# -*- coding: utf-8 -*-
from typing import Any, Dict

from pydantic import BaseModel, Extra


class DomainModel(BaseModel):
    """Base class of every document-backed type: unknown fields are rejected, enums are stored as values."""

    class Config:
        extra = Extra.forbid
        use_enum_values = True
        validate_all = True

    def to_document(self) -> Dict[str, Any]:
        """Plain-data form used for YAML documents; unset optional fields are left out."""
        return self.dict(exclude_none=True)
