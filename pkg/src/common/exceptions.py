# -*- coding: utf-8 -*-
from typing import Optional


class SimulatorError(Exception):
    """Root of every error raised by the simulator."""


class AuthorizationError(SimulatorError):
    """The session's principal is not declared anywhere in the cluster."""


class NotFoundError(SimulatorError):
    """A named resource or input file does not exist."""


class ConfigurationError(SimulatorError):
    """A fixture or scenario cannot be used as given."""


class UnsupportedScenarioError(SimulatorError):
    """The analyzer has no capability mapping for a scenario."""


class DocumentParseError(SimulatorError):
    """A YAML document is malformed or violates its schema."""

    def __init__(
        self, message: str, source: Optional[str] = None, line: Optional[int] = None, field: Optional[str] = None
    ) -> None:
        self.message = message
        self.source = source
        self.line = line
        self.field = field
        super().__init__(str(self))

    def __str__(self) -> str:
        location = self.source or "<document>"
        if self.line is not None:
            location = f"{location}:{self.line}"
        if self.field:
            return f"{location}: {self.field}: {self.message}"
        return f"{location}: {self.message}"
