"""Exception hierarchy shared by the library and the command line tools.

Each error class carries the process exit code the CLI maps it to, so that
scripted callers can distinguish misuse, bad input data, capability limits
and numerical failures without parsing messages.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CAPABILITY = 4
EXIT_NUMERICAL = 5


class QnmrError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class UsageError(QnmrError):
    """Invalid flags, config keys, or inconsistent option combinations."""

    exit_code = EXIT_USAGE


class DataError(QnmrError):
    """Unreadable or malformed input files."""

    exit_code = EXIT_DATA


class ParseError(DataError):
    """Malformed line in a text input file; records the 1-based line number."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class ValidationError(DataError):
    """Structurally valid input whose contents violate a model constraint."""


class CapabilityError(QnmrError):
    """Request exceeds a hard resource limit (e.g. statevector width)."""

    exit_code = EXIT_CAPABILITY


class NumericalError(QnmrError):
    """A numerical procedure failed (singular solve, degenerate input)."""

    exit_code = EXIT_NUMERICAL


class MitigationError(NumericalError):
    """Readout-mitigation solve failed; message includes diagnostics."""


class RoutingError(QnmrError):
    """The coupling map cannot host the circuit (disconnected, too small)."""

    exit_code = EXIT_CAPABILITY
