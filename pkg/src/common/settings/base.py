# -*- coding: utf-8 -*-
from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, BaseSettings

from src.common.consts.directories import CANONICAL_FIXTURE, POLICIES_DIR, ROOT_DIR, SCENARIOS_DIR
from src.common.consts.logger import DEFAULT_LOG_LEVEL
from src.common.utils.logger import get_logger
from src.common.utils.serialization import JsonEncoder

_logger = get_logger(__name__)


class PathSettings(BaseModel):
    """Locations of the shipped documents."""

    fixture: Path = CANONICAL_FIXTURE
    scenarios_dir: Path = SCENARIOS_DIR
    policies_dir: Path = POLICIES_DIR


class LoggingSettings(BaseModel):
    """Logging settings."""

    level: str = DEFAULT_LOG_LEVEL


class RunnerSettings(BaseModel):
    """Scenario runner settings."""

    max_workers: int = 4


class Settings(BaseSettings):
    """Serves as a container for the settings."""

    paths: PathSettings = PathSettings()
    logging: LoggingSettings = LoggingSettings()
    runner: RunnerSettings = RunnerSettings()

    class Config:
        env_file = ROOT_DIR / ".env"
        env_file_encoding = "utf-8"
        env_prefix = "SSCS_"
        env_nested_delimiter = "__"

    def __init__(self) -> None:
        super().__init__()
        self.check_if_env_file_exists()
        self.check_if_all_variables_loaded()

    def check_if_env_file_exists(self) -> None:
        """Check if the .env file exists and log it at debug level if it doesn't; every setting has a default."""
        env_path = self.Config.env_file
        if not env_path.exists():
            _logger.debug(f"The environment variables file at {env_path} does not exist. Using defaults.")

    def check_if_all_variables_loaded(self) -> None:
        """Check if all settings are loaded and log warnings for any that are missing."""
        for section_name, section in vars(self).items():
            if isinstance(section, BaseModel):
                for key, value in section.dict().items():
                    if value is None:
                        _logger.warning(f"{section_name}.{key} was not found.")

    def __str__(self) -> str:
        """
        Represent the Settings object as a JSON string.

        Returns:
            str: A JSON string representation of the Settings object.
        """
        return json.dumps(self.dict(), indent=4, cls=JsonEncoder)
