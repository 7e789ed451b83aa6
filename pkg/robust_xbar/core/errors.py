"""Exception hierarchy for robust_xbar.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class RobustXbarError(Exception):
    """Base class for all robust_xbar errors."""

    exit_code: int = 1


class InvalidInputError(RobustXbarError, ValueError):
    """An operation was called outside its preconditions."""

    exit_code = 3


class UnsupportedCombinationError(InvalidInputError):
    """An estimator and pooling type that cannot be combined."""


class DataError(RobustXbarError):
    """A dataset file could not be parsed or violates the schema."""

    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        """
        Initialize a data error.

        Args:
            message: What is wrong
            path: File the problem was found in
            line: 1-based line number within the file
        """
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class ConfigError(RobustXbarError):
    """A scenario configuration could not be parsed or validated."""

    exit_code = 3

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        """
        Initialize a configuration error.

        Args:
            message: What is wrong
            line: 1-based line of the offending entry, when known
            field: Name of the offending key, when known
        """
        self.detail = message
        self.line = line
        self.field = field
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field '{field}'")
        prefix = f"{', '.join(parts)}: " if parts else ""
        super().__init__(f"{prefix}{message}")


class FactorTableError(RobustXbarError):
    """A factor table file is unreadable, of another version or corrupted."""

    exit_code = 3


class TableIncompleteError(RobustXbarError, LookupError):
    """A factor table has no entry for the requested (estimator, n)."""

    exit_code = 4

    def __init__(self, estimator: str, n: int, detail: str = ""):
        self.estimator = estimator
        self.n = n
        message = f"factor table has no entry for ({estimator}, n={n})"
        if detail:
            message = f"{message}; {detail}"
        super().__init__(message)
