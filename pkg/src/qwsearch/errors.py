"""Exception types shared across the package."""

from __future__ import annotations


class QWSearchError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QWSearchError, ValueError):
    """A family or numeric parameter is outside its allowed range."""


class ContractViolation(QWSearchError, ValueError):
    """An operation's precondition was not met by its inputs."""


class ParseError(QWSearchError, ValueError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ComputationError(QWSearchError):
    """Numerical pipeline failure (maps to CLI exit code 3)."""


class NoCrossingError(ComputationError):
    pass


class NoDegeneracyError(ComputationError):
    pass
