"""Derivative-free single-objective optimizers used by the scalarization solvers.

Both optimizers work on batches: ``fun(X)`` maps a ``(k, n)`` array of
decision rows to ``k`` scalar values and ``feasible(X)`` to ``k`` booleans.
Constraints are handled by rejection, never by penalties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from .core import BoxBounds
from .errors import OptimizerFailure

BatchFn = Callable[[np.ndarray], np.ndarray]
BatchPredicate = Callable[[np.ndarray], np.ndarray]


class SingleObjectiveOptimizer(Protocol):
    def minimize(
        self,
        fun: BatchFn,
        bounds: BoxBounds,
        feasible: BatchPredicate | None = None,
        seed: int = 0,
        starts: Sequence[Sequence[float]] = (),
    ) -> np.ndarray: ...


def _mask(feasible: BatchPredicate | None, X: np.ndarray) -> np.ndarray:
    if feasible is None:
        return np.ones(X.shape[0], dtype=bool)
    return np.asarray(feasible(X), dtype=bool)


def _best(values: np.ndarray, ok: np.ndarray) -> int | None:
    vals = np.where(ok & np.isfinite(values), values, np.inf)
    i = int(np.argmin(vals))
    return None if not np.isfinite(vals[i]) else i


@dataclass
class GridSearch:
    """Exhaustive grid search with successive zoom-in refinement.

    The first pass lays ``resolution`` points per dimension over the box,
    capped so the grid holds at most ``max_points`` points. Each refinement
    re-grids a window of two coarse spacings around the incumbent with
    ``refine_points`` per dimension. Intended for ``n <= 3``.
    """

    resolution: int = 2048
    max_points: int = 2**18
    refinements: int = 5
    refine_points: int = 41

    def _axes(self, lo: np.ndarray, hi: np.ndarray, per_dim: int) -> list[np.ndarray]:
        return [np.linspace(a, b, per_dim if b > a else 1) for a, b in zip(lo, hi)]

    @staticmethod
    def _mesh(axes: list[np.ndarray]) -> np.ndarray:
        grids = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([g.ravel() for g in grids])

    def minimize(self, fun, bounds, feasible=None, seed=0, starts=()):
        lo, hi = bounds.as_arrays()
        n = lo.size
        per_dim = int(min(self.resolution, max(2, np.floor(self.max_points ** (1.0 / n) + 1e-9))))
        X = self._mesh(self._axes(lo, hi, per_dim))
        if len(starts):
            X = np.vstack([np.asarray(starts, dtype=float).reshape(-1, n), X])
        values = np.asarray(fun(X), dtype=float)
        i = _best(values, _mask(feasible, X))
        if i is None:
            raise OptimizerFailure("grid search found no feasible point")
        x_best, f_best = X[i].copy(), values[i]
        step = (hi - lo) / max(per_dim - 1, 1)
        for _ in range(self.refinements):
            wlo = np.maximum(lo, x_best - 2 * step)
            whi = np.minimum(hi, x_best + 2 * step)
            X = self._mesh(self._axes(wlo, whi, self.refine_points))
            values = np.asarray(fun(X), dtype=float)
            j = _best(values, _mask(feasible, X))
            if j is not None and values[j] < f_best:
                x_best, f_best = X[j].copy(), values[j]
            step = (whi - wlo) / max(self.refine_points - 1, 1)
        return x_best


@dataclass
class PatternSearch:
    """Seeded random-restart compass search for higher-dimensional boxes."""

    restarts: int = 8
    samples: int = 2000
    iterations: int = 400
    tol: float = 1e-9

    def minimize(self, fun, bounds, feasible=None, seed=0, starts=()):
        rng = np.random.default_rng(seed)
        lo, hi = bounds.as_arrays()
        n = lo.size
        X = lo + rng.random((self.samples, n)) * (hi - lo)
        if len(starts):
            X = np.vstack([np.asarray(starts, dtype=float).reshape(-1, n), X])
        values = np.asarray(fun(X), dtype=float)
        ok = _mask(feasible, X) & np.isfinite(values)
        if not ok.any():
            raise OptimizerFailure("pattern search found no feasible starting point")
        order = np.argsort(np.where(ok, values, np.inf), kind="stable")[: self.restarts]
        best_x, best_f = None, np.inf
        directions = np.vstack([np.eye(n), -np.eye(n)])
        for i in order:
            if not ok[i]:
                continue
            x, fx = X[i].copy(), values[i]
            step = 0.25 * (hi - lo)
            for _ in range(self.iterations):
                trial = np.clip(x + directions * step, lo, hi)
                tv = np.asarray(fun(trial), dtype=float)
                j = _best(tv, _mask(feasible, trial))
                if j is not None and tv[j] < fx:
                    x, fx = trial[j], tv[j]
                else:
                    step = step / 2
                    if np.all(step < self.tol * np.maximum(hi - lo, 1.0)):
                        break
            if fx < best_f:
                best_x, best_f = x, fx
        return best_x


def default_optimizer(n: int) -> SingleObjectiveOptimizer:
    return GridSearch() if n <= 3 else PatternSearch()
