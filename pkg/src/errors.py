"""
Exception hierarchy for the soil mapping pipeline.

Every exception carries an ``exit_code`` so the command-line front end can map
failures to process exit codes without inspecting messages:
2 for configuration problems, 3 for data problems, 4 for numerical problems.
"""

from typing import List, Optional, Sequence


class SoilMapError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(SoilMapError):
    """Run configuration failed validation. Lists every violated field."""

    exit_code = 2

    def __init__(self, message: str, errors: Optional[List[str]] = None):
        super().__init__(message)
        self.errors = list(errors or [])

    def __str__(self) -> str:
        if not self.errors:
            return self.message
        return self.message + "\n" + "\n".join(f"  - {e}" for e in self.errors)


class DataError(SoilMapError):
    """Input data violates a contract (schema, format, coverage, shape)."""

    exit_code = 3


class SchemaError(DataError):
    """A required column is missing from a tabular input."""

    def __init__(self, message: str, column: Optional[str] = None, path: Optional[str] = None):
        super().__init__(message)
        self.column = column
        self.path = path


class ParseError(DataError):
    """A cell could not be parsed as a finite decimal number."""

    def __init__(self, message: str, row: Optional[int] = None,
                 column: Optional[str] = None, path: Optional[str] = None):
        super().__init__(message)
        self.row = row
        self.column = column
        self.path = path


class RasterFormatError(DataError):
    """An ESRI ASCII grid is malformed."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


class CoverageError(DataError):
    """A realignment block has no usable covariate values."""

    def __init__(self, message: str, covariate: Optional[str] = None, index: Optional[int] = None):
        super().__init__(message)
        self.covariate = covariate
        self.index = index


class DegenerateColumnError(DataError):
    """A design column is constant and cannot be standardized."""

    def __init__(self, message: str, term: Optional[str] = None):
        super().__init__(message)
        self.term = term


class PreconditionError(DataError):
    """An operation was called with inputs outside its contract."""


class DimensionMismatchError(DataError):
    """Matrix shapes or column sets do not line up."""


class DomainError(DataError):
    """A formula is undefined for the supplied inputs."""

    def __init__(self, message: str, keys: Sequence[str] = ()):
        super().__init__(message)
        self.keys = tuple(keys)


class NumericError(SoilMapError):
    """A numerical procedure failed."""

    exit_code = 4


class SingularSystemError(NumericError):
    """A linear system is singular or too ill-conditioned to solve."""


class CollinearityError(NumericError):
    """Selected design columns are linearly dependent."""

    def __init__(self, message: str, columns: Sequence[int] = ()):
        super().__init__(message)
        self.columns = tuple(columns)


class DegenerateWeightError(NumericError):
    """Model-averaging weights are undefined because a validation SSE is zero."""
