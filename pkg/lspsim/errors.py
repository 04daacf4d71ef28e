"""
Error types and their mapping onto CLI exit codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lspsim.scenario.report import RunReport

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_SIGNALING_FAILURE = 2


class LspSimError(Exception):
    """Base class for every error raised by the simulator."""


class KernelError(LspSimError):
    """The queuing kernel was used incorrectly or reached an impossible state."""


class SchedulingError(KernelError):
    pass


class DefinitionError(KernelError):
    pass


class FacilityError(KernelError):
    pass


class VariateError(KernelError, ValueError):
    pass


class DispatchError(KernelError):
    pass


@dataclass(frozen=True)
class LineError:
    line: int
    message: str

    def __str__(self):
        if self.line <= 0:
            return self.message
        return f"line {self.line}: {self.message}"


class ConfigError(LspSimError):
    def __init__(self, errors: list[LineError] | str):
        if isinstance(errors, str):
            errors = [LineError(0, errors)]
        self.errors = list(errors)
        super().__init__("\n".join(str(error) for error in self.errors))


class SignalingError(LspSimError):
    """A mandatory LSP could not be established."""

    def __init__(self, message: str, report: RunReport | None = None):
        super().__init__(message)
        self.report = report


class OutputError(LspSimError):
    def __init__(self, path, reason: str, action: str = "write"):
        self.path = path
        super().__init__(f"cannot {action} {path}: {reason}")


_EXIT_CODES: list[tuple[type[LspSimError], int]] = [
    (ConfigError, EXIT_CONFIG_ERROR),
    (OutputError, EXIT_CONFIG_ERROR),
    (SignalingError, EXIT_SIGNALING_FAILURE),
]


def exit_code_for(exc: BaseException) -> int | None:
    """Exit code for a handled failure, or None when the error should propagate."""
    for error_type, code in _EXIT_CODES:
        if isinstance(exc, error_type):
            return code
    return None
