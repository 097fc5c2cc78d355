"""Exception hierarchy.

The CLI maps :class:`UsageError` to exit status 1 and every other
:class:`BellLabError` to exit status 2.
"""


class BellLabError(Exception):
    """Base class for all toolkit errors."""


class UsageError(BellLabError, ValueError):
    """Malformed call: wrong lengths, empty input, unknown option."""


class DomainError(BellLabError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class PreconditionError(BellLabError, ValueError):
    """An operation was called on inputs that violate its precondition."""


class IncompleteInputError(BellLabError, KeyError):
    """A required correlation slot is missing."""

    def __init__(self, slot):
        super().__init__(slot)
        self.slot = slot

    def __str__(self):
        return f"missing correlation slot {self.slot!r}"


class DegenerateDirectionError(BellLabError, ArithmeticError):
    """Both directional derivatives agree, so the perturbation carries no signal."""


class InconclusiveDegreeError(BellLabError, ArithmeticError):
    """No Taylor coefficient rose above the noise threshold."""


class CapabilityError(BellLabError, TypeError):
    """The model cannot produce the requested counterfactual readings."""


class NoViolationError(DomainError, PreconditionError):
    """A robustness margin was requested at a point that shows no violation."""
