"""Problem model, dominance relation, Pareto filtering and non-dominated sorting.

All objectives are minimized. Objective vectors are compared with exact
floating-point comparisons; identical vectors are EQUAL and never dominate
each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput, NonFiniteObjective

Evaluator = Callable[[np.ndarray], Any]

_CHUNK = 512


class DominanceRelation(Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


@dataclass(frozen=True)
class BoxBounds:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper):
            raise DimensionMismatch("lower and upper bounds differ in length")
        if any(lo > hi for lo, hi in zip(lower, upper)):
            raise ValueError("every lower bound must be <= its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return len(self.lower)

    def contains(self, x: Sequence[float]) -> bool:
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)


@dataclass(frozen=True)
class ConstraintSet:
    """Inequalities ``g(x) >= 0`` and equalities ``|h(x)| <= eq_tolerance``."""

    inequalities: tuple[Evaluator, ...] = ()
    equalities: tuple[Evaluator, ...] = ()
    eq_tolerance: float = 1e-8

    def __post_init__(self) -> None:
        if not self.eq_tolerance > 0:
            raise ValueError("eq_tolerance must be positive")
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))


@dataclass(frozen=True)
class Problem:
    """A box-bounded, optionally constrained, multi-objective minimization problem.

    Objective and constraint callables receive the decision vector as a 1-D
    array. When ``vectorized`` is true they must also accept an ``(n, k)``
    array (one column per point) and return ``k`` values, which lets the
    grid optimizers evaluate whole batches at once.
    """

    objectives: tuple[Evaluator, ...]
    bounds: BoxBounds
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    name: str = ""
    vectorized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(self.objectives))
        if len(self.objectives) < 2:
            raise ValueError("a multi-objective problem needs at least two objectives")

    @property
    def n(self) -> int:
        return self.bounds.n

    @property
    def M(self) -> int:
        return len(self.objectives)

    @property
    def J(self) -> int:
        return len(self.constraints.inequalities)

    @property
    def K(self) -> int:
        return len(self.constraints.equalities)

    def _batch(self, fn: Evaluator, X: np.ndarray) -> np.ndarray:
        if self.vectorized:
            out = np.asarray(fn(X.T), dtype=float)
            if out.shape == (X.shape[0],):
                return out
            return np.broadcast_to(out, (X.shape[0],)).astype(float)
        return np.array([float(fn(row)) for row in X], dtype=float)

    def objectives_batch(self, X: np.ndarray) -> np.ndarray:
        """Objective matrix ``(k, M)`` for decision rows ``X`` of shape ``(k, n)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.column_stack([self._batch(f, X) for f in self.objectives])

    def feasible_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo, hi = self.bounds.as_arrays()
        ok = np.all((X >= lo) & (X <= hi), axis=1)
        for g in self.constraints.inequalities:
            ok &= self._batch(g, X) >= 0
        tol = self.constraints.eq_tolerance
        for h in self.constraints.equalities:
            ok &= np.abs(self._batch(h, X)) <= tol
        return ok


@dataclass(frozen=True)
class Solution:
    """A decision vector with its cached objective vector and feasibility flag."""

    x: tuple
    f: tuple[float, ...]
    feasible: bool = True

    @property
    def objectives(self) -> np.ndarray:
        return np.asarray(self.f, dtype=float)


@dataclass
class Front:
    """An ordered collection of solutions (or bare objective vectors)."""

    entries: list = field(default_factory=list)
    nondominated: bool = False
    # per-entry provenance (sweep method and parameter), aligned with entries
    meta: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def objectives(self) -> np.ndarray:
        return objective_matrix(self.entries)


def objective_matrix(items: Iterable | np.ndarray) -> np.ndarray:
    """Stack the objective vectors of ``items`` into a ``(k, M)`` float array.

    Accepts solutions (anything with an ``f`` attribute), a :class:`Front`,
    raw sequences of numbers, or an existing 2-D array.
    """
    if isinstance(items, np.ndarray):
        return np.atleast_2d(items.astype(float, copy=False))
    if isinstance(items, Front):
        items = items.entries
    rows = [getattr(it, "f", it) for it in items]
    if not rows:
        return np.empty((0, 0))
    F = np.asarray(rows, dtype=float)
    if F.ndim != 2:
        raise DimensionMismatch("objective vectors must all have the same length")
    return F


def evaluate(problem: Problem, x: Sequence[float]) -> Solution:
    x_arr = np.asarray(x, dtype=float)
    if x_arr.shape != (problem.n,):
        raise DimensionMismatch(f"expected {problem.n} decision variables, got {x_arr.size}")
    f = []
    for i, fn in enumerate(problem.objectives):
        v = float(fn(x_arr))
        if not math.isfinite(v):
            raise NonFiniteObjective(f"objective f_{i + 1} returned {v} at x={tuple(x_arr)}")
        f.append(v)
    feasible = bool(problem.feasible_batch(x_arr[None, :])[0])
    return Solution(tuple(float(v) for v in x_arr), tuple(f), feasible)


def compare_dominance(a: Sequence[float], b: Sequence[float]) -> DominanceRelation:
    a = np.asarray(getattr(a, "f", a), dtype=float)
    b = np.asarray(getattr(b, "f", b), dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare vectors of length {a.size} and {b.size}")
    le = bool(np.all(a <= b))
    ge = bool(np.all(a >= b))
    if le and ge:
        return DominanceRelation.EQUAL
    if le:
        return DominanceRelation.DOMINATES
    if ge:
        return DominanceRelation.DOMINATED_BY
    return DominanceRelation.INCOMPARABLE


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return compare_dominance(a, b) is DominanceRelation.DOMINATES


def domination_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is true when row ``i`` dominates row ``j``."""
    F = np.asarray(F, dtype=float)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of ``F`` not dominated by any other row."""
    F = np.asarray(F, dtype=float)
    if F.ndim == 2 and F.shape[1] == 2 and F.shape[0] > 1:
        return _nondominated_mask_2d(F)
    k = F.shape[0]
    mask = np.ones(k, dtype=bool)
    for start in range(0, k, _CHUNK):
        block = F[start:start + _CHUNK]
        # rows of F that dominate each row of block
        le = np.all(F[:, None, :] <= block[None, :, :], axis=2)
        lt = np.any(F[:, None, :] < block[None, :, :], axis=2)
        mask[start:start + _CHUNK] = ~np.any(le & lt, axis=0)
    return mask


def _nondominated_mask_2d(F: np.ndarray) -> np.ndarray:
    # sort by (f1, f2); a row is dominated by an earlier f1 group with f2 <= its own,
    # or by a row in its own f1 group with strictly smaller f2
    order = np.lexsort((F[:, 1], F[:, 0]))
    s1, s2 = F[order, 0], F[order, 1]
    first = np.searchsorted(s1, s1, side="left")
    prefix = np.minimum.accumulate(s2)
    before = np.where(first > 0, prefix[np.maximum(first - 1, 0)], np.inf)
    dominated = (before <= s2) | (s2[first] < s2)
    mask = np.empty(F.shape[0], dtype=bool)
    mask[order] = ~dominated
    return mask


def dominator_counts(F: np.ndarray) -> np.ndarray:
    """Number of rows dominating each row."""
    F = np.asarray(F, dtype=float)
    counts = np.zeros(F.shape[0], dtype=int)
    for start in range(0, F.shape[0], _CHUNK):
        block = F[start:start + _CHUNK]
        le = np.all(F[:, None, :] <= block[None, :, :], axis=2)
        lt = np.any(F[:, None, :] < block[None, :, :], axis=2)
        counts[start:start + _CHUNK] = np.sum(le & lt, axis=0)
    return counts


def iterative_front_indices(F: np.ndarray) -> list[list[int]]:
    """Peel successive non-dominated layers; returns index lists, best first."""
    F = np.asarray(F, dtype=float)
    remaining = np.arange(F.shape[0])
    fronts: list[list[int]] = []
    while remaining.size:
        mask = nondominated_mask(F[remaining])
        fronts.append(remaining[mask].tolist())
        remaining = remaining[~mask]
    return fronts


def _check_items(items) -> tuple[list, np.ndarray]:
    entries = list(items.entries if isinstance(items, Front) else items)
    if not entries:
        raise EmptyInput("at least one solution is required")
    return entries, objective_matrix(entries)


def pareto_filter(solutions) -> Front:
    """Keep exactly the non-dominated entries, in input order (ties all kept)."""
    entries, F = _check_items(solutions)
    mask = nondominated_mask(F)
    return Front([e for e, keep in zip(entries, mask) if keep], nondominated=True)


def nondominated_sort_iterative(solutions) -> list[Front]:
    entries, F = _check_items(solutions)
    return [Front([entries[i] for i in idx], nondominated=True) for idx in iterative_front_indices(F)]


def dominator_count_partition(solutions) -> list[list]:
    """Group solutions by how many others dominate them.

    Group ``k`` holds the solutions dominated by exactly ``k`` others. Empty
    groups between non-empty ones are kept, so the result for five points
    where the worst is dominated three times is ``[g0, g1, [], g3]``.
    """
    entries, F = _check_items(solutions)
    counts = dominator_counts(F)
    groups: list[list] = [[] for _ in range(int(counts.max()) + 1)]
    for entry, c in zip(entries, counts):
        groups[int(c)].append(entry)
    return groups


def utopia_and_nadir(front) -> tuple[tuple[float, ...], tuple[float, ...]]:
    _, F = _check_items(front)
    return tuple(F.min(axis=0).tolist()), tuple(F.max(axis=0).tolist())
