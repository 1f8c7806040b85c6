"""Exception types shared across the package."""

from __future__ import annotations


class ParamodelError(Exception):
    """Base class for all package-specific errors."""


class InvalidParams(ParamodelError, ValueError):
    """Controller or filter parameters violate their constraints."""


class DivergenceError(ParamodelError, ArithmeticError):
    """A simulated quantity became non-finite.

    Carries the iteration index at which the blow-up was detected, when
    the raising code knows it.
    """

    def __init__(self, message: str, iteration: int | None = None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration


class DimensionMismatch(ParamodelError, ValueError):
    """An input vector does not match the expected dimension."""


class IndexOutOfRange(ParamodelError, IndexError):
    """A weight or input index is outside the valid range."""


class InvalidEvent(ParamodelError, ValueError):
    """A scenario event refers to an invalid target or is malformed."""


class ParseError(ParamodelError, ValueError):
    """Configuration text could not be parsed.

    ``line`` is the 1-based line number when known, else None.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ParamodelError, ValueError):
    """Parsed configuration is semantically invalid.

    ``key`` names the offending configuration entry.
    """

    def __init__(self, message: str, key: str | None = None):
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key
