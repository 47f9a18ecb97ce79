"""Exception types shared across the package."""

from __future__ import annotations


class FFCircleError(Exception):
    """Base class for all package errors."""


class ValidationError(FFCircleError, ValueError):
    """An input violates a documented precondition."""


class IncompatibleTower(ValidationError):
    pass


class NonRationalValue(FFCircleError, ArithmeticError):
    """A cyclotomic value expected to be a rational integer is not."""


class SpecialRange(ValidationError):
    """The line bundle L(-B) is outside the non-special range."""


class BudgetExceeded(FFCircleError):
    """An enumeration would exceed the configured evaluation ceiling."""

    def __init__(self, needed: int, budget: int, what: str = "enumeration"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what} needs {needed} evaluations, budget is {budget}")


class IdentityViolation(FFCircleError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class InconsistentSlope(FFCircleError):
    pass


class NotFactoring(FFCircleError, ValueError):
    """A functional does not factor through the requested divisor."""


class NonpositiveDenominator(FFCircleError, ValueError):
    """The minor-arc inequality is inapplicable for these parameters."""


class NoWitness(FFCircleError):
    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        super().__init__(f"no witness: {constraint} {detail}".strip())


class EvenCharacteristic(ValidationError):
    pass


class DivisibleRamification(ValidationError):
    pass


DEFAULT_BUDGET = 10**9


def check_budget(needed: int, budget: int | None, what: str = "enumeration") -> None:
    limit = DEFAULT_BUDGET if budget is None else budget
    if needed > limit:
        raise BudgetExceeded(needed, limit, what)
