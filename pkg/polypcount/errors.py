"""Exception hierarchy for polypcount.

Library code raises these; the CLI entry point turns them into an error
JSON on stderr and the matching exit code.
"""

from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class PolypCountError(Exception):
    """Base class for every error raised by polypcount."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = {k: v for k, v in details.items() if v is not None}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form of the error.

        Returns:
            Dictionary with error type, message and any extra details
        """
        payload = {"error": type(self).__name__, "message": self.message}
        payload.update(self.details)
        return payload


class ConfigError(PolypCountError):
    """Configuration constraint violated or unknown setting."""

    exit_code = EXIT_USAGE


class DataError(PolypCountError):
    """Input data is missing or malformed."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None, **details: Any):
        super().__init__(message, path=path, line=line, **details)
        self.path = path
        self.line = line


class InvalidDetectionError(DataError):
    """A detection has a degenerate (zero or negative area) box."""


class InvalidBatchError(DataError):
    """An embedding batch violates its invariants."""


class DegenerateBatchError(DataError):
    """No anchor in the batch has a matching candidate."""


class ScenarioError(DataError):
    """A synthetic scenario cannot be generated with the given config."""


class ReproductionMismatch(DataError):
    """Re-running a manifest produced different artifacts."""


class NumericalError(PolypCountError):
    """Non-finite values appeared in a computation."""

    exit_code = EXIT_NUMERICAL
