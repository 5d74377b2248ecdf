"""Exception and warning types raised across pareto_kit."""

from __future__ import annotations


class ParetoKitError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(ParetoKitError, ValueError):
    pass


class EmptyInput(ParetoKitError, ValueError):
    pass


class NonFiniteObjective(ParetoKitError, ArithmeticError):
    """An objective evaluator returned NaN or infinity."""


class OverflowGuard(ParetoKitError, OverflowError):
    """An exponential or product scalarization left the float range."""


class OptimizerFailure(ParetoKitError, RuntimeError):
    """The single-objective optimizer found no feasible point."""


class Infeasible(OptimizerFailure):
    """A constrained sub-problem (epsilon bounds, lexicographic stage) has no feasible point."""


class Unsupported(ParetoKitError, NotImplementedError):
    pass


class InvalidGenome(ParetoKitError, ValueError):
    pass


class PopulationTooSmall(ParetoKitError, ValueError):
    pass


class InvalidNicheCount(ParetoKitError, ValueError):
    pass


class TooFewPoints(ParetoKitError, ValueError):
    pass


class NegativeObjective(ParetoKitError, ValueError):
    """Origin-anchored hypervolume is undefined for negative coordinates."""


class ParseError(ParetoKitError, ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class EmptyDataset(ParetoKitError, ValueError):
    pass


class InvalidN(ParetoKitError, ValueError):
    pass


class ConfigError(ParetoKitError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""


class DegenerateObjective(UserWarning):
    """An objective is constant over the candidate set and was ignored."""


class ColdUser(UserWarning):
    """A user has no training ratings; popularity ranking was used instead."""
