# -*- coding: utf-8 -*-
import pytest

from src.common.exceptions import DocumentParseError
from src.common.settings.base import Settings
from src.common.utils.logger import get_logger
from src.common.utils.serialization import canonical_digest, canonical_json

pytestmark = pytest.mark.unit


def test_settings_defaults() -> None:
    settings = Settings()
    assert settings.runner.max_workers == 4
    assert settings.logging.level == "INFO"
    assert settings.paths.fixture.name == "canonical.yaml"


def test_settings_read_nested_environment_variables(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("SSCS_RUNNER__MAX_WORKERS", "8")
    assert Settings().runner.max_workers == 8


def test_get_logger_adds_a_single_handler() -> None:
    get_logger("src.tests.logger")
    logger = get_logger("src.tests.logger")
    assert len(logger.handlers) == 1
    assert not logger.propagate


def test_canonical_json_ignores_key_order() -> None:
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert canonical_digest({"b": 1, "a": 2}) == canonical_digest({"a": 2, "b": 1})
    assert canonical_digest({"a": 1}) != canonical_digest({"a": 2})


def test_document_parse_error_formats_its_location() -> None:
    error = DocumentParseError("field required", "scenario.yaml", 4, "goal")
    assert str(error) == "scenario.yaml:4: goal: field required"
    assert str(DocumentParseError("bad", line=2)) == "<document>:2: bad"
