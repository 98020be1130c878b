"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HoferBoundError(Exception):
    """Base class for all package errors."""


class ScenarioError(HoferBoundError):
    """Malformed or unsupported scenario input."""


class UnsupportedFamily(ScenarioError):
    pass


class BadParameters(ScenarioError):
    pass


class FocalPointEndpoint(HoferBoundError):
    pass


class NonConvergence(HoferBoundError):
    pass


class CapTooSmall(HoferBoundError):
    pass


class AssumptionViolated(HoferBoundError):
    """Raised when one clause of the index assumption fails.

    ``clause`` is one of ``"i"``, ``"ii"``, ``"iii"``, ``"iv"`` and ``report``
    carries the full assumption report when available.
    """

    def __init__(self, clause: str, message: str = "", report=None):
        super().__init__(f"clause ({clause}) fails" + (f": {message}" if message else ""))
        self.clause = clause
        self.report = report


class TransversalityViolation(HoferBoundError):
    pass


class DuplicateAction(HoferBoundError):
    pass


class InvariantViolation(HoferBoundError):
    pass


class BudgetExceeded(HoferBoundError):
    pass


class Infeasible(HoferBoundError):
    pass


class NoPrimitiveAvailable(HoferBoundError):
    pass


class SandwichVacuous(HoferBoundError):
    """Informational: the sup-norm does not exceed the additive constant."""
