"""Exception hierarchy shared by every hyperlab module."""

from __future__ import annotations


class HyperlabError(Exception):
    """Base class for hyperlab failures."""


class DimensionError(HyperlabError, ValueError):
    """A vector does not match the ambient dimension of its form."""


class PreconditionError(HyperlabError, ValueError):
    """An operation precondition (argument or hypothesis) does not hold."""


class BudgetError(HyperlabError, ValueError):
    """An exhaustive computation would exceed its enumeration budget."""


class NotHyperbolicAtPoint(HyperlabError, ArithmeticError):
    """The restriction t -> h(te - x) has a root with a non-negligible imaginary part."""

    def __init__(self, message: str, root: complex, point=None, trial: int | None = None):
        super().__init__(message)
        self.root = root
        self.point = point
        self.trial = trial


class NumericalFailure(HyperlabError, ArithmeticError):
    """A numerical routine could not meet its accuracy contract."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class GeneratorContractError(HyperlabError, ValueError):
    """A cone sample generator produced a vector outside its declared envelope."""


class InfeasibleError(HyperlabError, ValueError):
    """No feasible point was found for a constrained optimisation."""
