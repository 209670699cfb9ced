"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command line layer
never has to guess.
"""
from __future__ import annotations


class HelixSRFError(Exception):
    exit_code = 1


class SpecError(HelixSRFError, ValueError):
    """Malformed request: index bounds, cardinalities, option ranges."""

    exit_code = 2


class DomainError(HelixSRFError, ValueError):
    """Parameters outside the domain where a closed form is defined."""

    exit_code = 3


class DegenerateError(DomainError):
    """Coincident points or zero-length edges."""


class EmptyFeasibleSet(DomainError):
    pass


class NonConvergence(HelixSRFError, RuntimeError):
    exit_code = 4

    def __init__(self, message: str = "", best: float | None = None):
        super().__init__(message)
        # objective value of the last iterate, when the iteration has one
        self.best = best


class DegenerateRoot(NonConvergence):
    """Newton landed on the trivial root cos(omega) = 1."""


class CrossCheckFailure(HelixSRFError, RuntimeError):
    exit_code = 4
