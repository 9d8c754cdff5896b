"""Exception hierarchy shared by the package."""

from __future__ import annotations


class AndFeaturesError(Exception):
    """Base class for all package errors."""


class ParseError(AndFeaturesError, ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(AndFeaturesError, ValueError):
    """Input data violates a structural precondition."""


class DomainError(AndFeaturesError, ValueError):
    """Argument outside the domain of a mathematical operation."""


class ConfigError(AndFeaturesError, ValueError):
    """Invalid run configuration."""


class OracleInfeasible(AndFeaturesError):
    """Exhaustive enumeration would exceed the configured budget."""

    def __init__(self, bound: int, budget: int):
        self.bound = bound
        self.budget = budget
        super().__init__(
            f"oracle infeasible: sum of 2^k_i = {bound} exceeds budget {budget}"
        )


class BoundsError(AndFeaturesError, IndexError):
    """An index refers past the end of the network."""
