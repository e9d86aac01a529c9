"""Error hierarchy shared by the library and the command line.

Library code raises; only ``app.cli`` turns an error into a process exit code.
"""
from typing import Optional


class AlhazenError(Exception):
    """Base error carrying the exit code the CLI reports for it."""

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class DomainError(AlhazenError):
    """Inputs violate an operation's precondition."""

    exit_code = 2


class NumericalFailure(AlhazenError):
    """A solver could not deliver a result that is guaranteed to exist."""

    exit_code = 3


class VerificationMismatch(AlhazenError):
    """An independent check disagreed with the primary computation."""

    exit_code = 3


class ParseError(AlhazenError):
    """Malformed command line or complex literal."""

    exit_code = 4
