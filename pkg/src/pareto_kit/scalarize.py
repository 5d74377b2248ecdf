"""Scalarization solvers: weighting methods, epsilon-constraint, NBI/NC,
goal programming and the lexicographic method, plus the parameter sweeps
that trace an approximate Pareto front from them.

Objective numbers in this module's public API are 1-based (``f_1`` is
objective 1) to match the usual notation for these methods.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .core import Front, Problem, Solution, evaluate, nondominated_mask, objective_matrix
from .errors import DimensionMismatch, Infeasible, OptimizerFailure, OverflowGuard, Unsupported
from .optimize import SingleObjectiveOptimizer, default_optimizer

log = logging.getLogger(__name__)

SIMPLEX_DELTA = 1e-3


class ScalarizationKind(Enum):
    WEIGHTED_SUM = "weighted-sum"
    WEIGHTED_EXP_SUM = "weighted-exp-sum"
    WEIGHTED_METRIC = "weighted-metric"
    CHEBYSHEV = "chebyshev"
    EXP_WEIGHTED_CRITERION = "exp-weighted-criterion"
    WEIGHTED_PRODUCT = "weighted-product"


class IdealMode(Enum):
    UTOPIA = "utopia"
    GOAL = "goal"
    ORIGIN = "origin"


_NEEDS_IDEAL = {ScalarizationKind.WEIGHTED_METRIC, ScalarizationKind.CHEBYSHEV}


def check_weights(weights: Sequence[float], tol: float = 1e-12) -> tuple[float, ...]:
    w = tuple(float(v) for v in weights)
    if any(not v > 0 for v in w):
        raise ValueError(f"weights must be strictly positive, got {w}")
    if abs(math.fsum(w) - 1.0) > tol:
        raise ValueError(f"weights must sum to 1, got {math.fsum(w)!r}")
    return w


@dataclass(frozen=True)
class ScalarizationMethod:
    kind: ScalarizationKind
    weights: tuple[float, ...]
    p: float = 2.0
    ideal_mode: IdealMode = IdealMode.UTOPIA
    goal: tuple[float, ...] | None = None
    # resolved ideal point; filled in by solve_scalarized for UTOPIA mode
    ideal: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", check_weights(self.weights))
        if self.kind in (
            ScalarizationKind.WEIGHTED_EXP_SUM,
            ScalarizationKind.WEIGHTED_METRIC,
            ScalarizationKind.EXP_WEIGHTED_CRITERION,
        ) and not self.p >= 1:
            raise ValueError("exponent p must be >= 1")
        if self.ideal_mode is IdealMode.GOAL and self.kind in _NEEDS_IDEAL:
            if self.goal is None or len(self.goal) != len(self.weights):
                raise ValueError("GOAL ideal mode needs a goal vector with one entry per objective")

    def with_weights(self, weights: Sequence[float]) -> "ScalarizationMethod":
        return ScalarizationMethod(self.kind, tuple(weights), self.p, self.ideal_mode, self.goal, self.ideal)

    def with_ideal(self, ideal: Sequence[float]) -> "ScalarizationMethod":
        return ScalarizationMethod(
            self.kind, self.weights, self.p, self.ideal_mode, self.goal, tuple(float(v) for v in ideal)
        )

    def resolved_ideal(self) -> np.ndarray:
        if self.ideal_mode is IdealMode.ORIGIN:
            return np.zeros(len(self.weights))
        if self.ideal_mode is IdealMode.GOAL:
            return np.asarray(self.goal, dtype=float)
        if self.ideal is None:
            raise ValueError("UTOPIA mode needs a precomputed ideal point (see utopia_point)")
        return np.asarray(self.ideal, dtype=float)


def scalarize_values(F: np.ndarray, method: ScalarizationMethod) -> np.ndarray:
    """Apply the scalarizing function row-wise to an objective matrix."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    w = np.asarray(method.weights)
    if F.shape[1] != w.size:
        raise DimensionMismatch(f"{w.size} weights for {F.shape[1]} objectives")
    kind, p = method.kind, method.p
    with np.errstate(over="ignore", invalid="ignore"):
        if kind is ScalarizationKind.WEIGHTED_SUM:
            return F @ w
        if kind is ScalarizationKind.WEIGHTED_EXP_SUM:
            return np.power(F, p) @ w
        if kind is ScalarizationKind.WEIGHTED_METRIC:
            d = np.abs(F - method.resolved_ideal())
            return np.power(np.power(d, p) @ np.power(w, p), 1.0 / p)
        if kind is ScalarizationKind.CHEBYSHEV:
            return np.max(w * np.abs(F - method.resolved_ideal()), axis=1)
        if kind is ScalarizationKind.EXP_WEIGHTED_CRITERION:
            out = np.exp(p * F) @ (np.exp(p * w) - 1.0)
        elif kind is ScalarizationKind.WEIGHTED_PRODUCT:
            out = np.prod(np.power(np.abs(F), w), axis=1)
        else:  # pragma: no cover
            raise ValueError(kind)
    if np.any(np.isinf(out)):
        raise OverflowGuard(f"{kind.value} overflowed the float range")
    return out


class ScalarObjective:
    """Single-objective evaluator built from a problem and a scalarization."""

    def __init__(self, problem: Problem, method: ScalarizationMethod):
        self.problem = problem
        self.method = method

    def __call__(self, x: Sequence[float]) -> float:
        return float(self.batch(np.asarray(x, dtype=float)[None, :])[0])

    def batch(self, X: np.ndarray) -> np.ndarray:
        return scalarize_values(self.problem.objectives_batch(X), self.method)


def scalar_objective(problem: Problem, method: ScalarizationMethod) -> ScalarObjective:
    if method.kind in _NEEDS_IDEAL:
        method.resolved_ideal()  # fail early when UTOPIA is unresolved
    return ScalarObjective(problem, method)


def _optimizer(problem: Problem, optimizer: SingleObjectiveOptimizer | None) -> SingleObjectiveOptimizer:
    return optimizer if optimizer is not None else default_optimizer(problem.n)


def _minimize_objective(problem, column_fn, extra_feasible, optimizer, seed, starts=()) -> Solution:
    def fun(X):
        return column_fn(problem.objectives_batch(X))

    def feasible(X):
        ok = problem.feasible_batch(X)
        if extra_feasible is not None:
            ok &= extra_feasible(problem.objectives_batch(X))
        return ok

    x = _optimizer(problem, optimizer).minimize(fun, problem.bounds, feasible, seed=seed, starts=starts)
    if x is None:
        raise OptimizerFailure("optimizer returned no point")
    return evaluate(problem, x)


# --- ideal and anchor points -------------------------------------------------


def anchor_points(problem: Problem, optimizer=None, seed: int = 0) -> list[Solution]:
    """Minimizer of each objective, ties on the other objectives broken lexicographically."""
    slack = 1e-9 * _objective_ranges(problem, seed)
    anchors = []
    for i in range(1, problem.M + 1):
        order = [i] + [j for j in range(1, problem.M + 1) if j != i]
        anchors.append(lexicographic(problem, order, optimizer, slack=slack, seed=seed))
    return anchors


def utopia_point(problem: Problem, optimizer=None, seed: int = 0) -> tuple[float, ...]:
    """Componentwise minimum of the objectives over the feasible set."""
    return tuple(
        _minimize_objective(problem, lambda F, i=i: F[:, i], None, optimizer, seed).f[i]
        for i in range(problem.M)
    )


def _resolve(problem: Problem, method: ScalarizationMethod, optimizer, seed) -> ScalarizationMethod:
    if method.kind in _NEEDS_IDEAL and method.ideal_mode is IdealMode.UTOPIA and method.ideal is None:
        return method.with_ideal(utopia_point(problem, optimizer, seed))
    return method


# --- weighting methods -------------------------------------------------------


def solve_scalarized(problem: Problem, method: ScalarizationMethod, optimizer=None, seed: int = 0) -> Solution:
    method = _resolve(problem, method, optimizer, seed)
    return _minimize_objective(problem, lambda F: scalarize_values(F, method), None, optimizer, seed)


def simplex_weights(M: int, grid_size: int, delta: float = SIMPLEX_DELTA) -> list[tuple[float, ...]]:
    """Evenly spaced weights on the open simplex.

    For two objectives this is ``grid_size`` points with ``w_1`` running from
    ``delta`` to ``1 - delta``. For more objectives it is the simplex lattice
    with ``grid_size - 1`` divisions, shrunk the same way.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    H = grid_size - 1
    out = []
    for combo in itertools.product(range(H + 1), repeat=M - 1):
        if sum(combo) > H:
            continue
        t = [c / H for c in combo] + [(H - sum(combo)) / H]
        w = [delta + (1.0 - M * delta) * v for v in t]
        s = math.fsum(w)
        out.append(tuple(v / s for v in w))
    if M == 2:
        out.sort()
    return out


@dataclass
class SweepPoint:
    param: dict
    solution: Solution | None = None
    error: str | None = None


def collect_sweep(method_name: str, points: Sequence[SweepPoint]) -> Front:
    """Filter sweep results down to their non-dominated members.

    Results stay in parameter order; failed parameters are recorded in
    ``front.failures``. Raises :class:`OptimizerFailure` when every parameter
    failed.
    """
    ok = [p for p in points if p.solution is not None]
    failures = [p for p in points if p.solution is None]
    if not ok:
        raise OptimizerFailure(f"{method_name}: every sweep parameter failed")
    mask = nondominated_mask(objective_matrix([p.solution for p in ok]))
    kept = [p for p, m in zip(ok, mask) if m]
    return Front(
        [p.solution for p in kept],
        nondominated=True,
        meta=[{"method": method_name, "param": p.param} for p in kept],
        failures=[{"param": p.param, "error": p.error} for p in failures],
    )


def weight_sweep(problem: Problem, method: ScalarizationMethod, grid_size: int, optimizer=None, seed: int = 0) -> Front:
    method = _resolve(problem, method, optimizer, seed)
    points = []
    for w in simplex_weights(problem.M, grid_size):
        param = {"weights": list(w)}
        try:
            points.append(SweepPoint(param, solve_scalarized(problem, method.with_weights(w), optimizer, seed)))
        except OptimizerFailure as exc:
            log.warning("weight %s failed: %s", w, exc)
            points.append(SweepPoint(param, error=str(exc)))
    return collect_sweep(method.kind.value, points)


# --- epsilon-constraint ------------------------------------------------------


@dataclass(frozen=True)
class EpsilonBounds:
    """Keep objective ``keep`` (1-based); bound the others by ``eps``.

    ``eps`` has one entry per objective; the entry for ``keep`` is ignored.
    Infinite bounds are allowed and act as no constraint.
    """

    keep: int
    eps: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", tuple(float(v) for v in self.eps))
        if not 1 <= self.keep <= len(self.eps):
            raise ValueError(f"keep must be in 1..{len(self.eps)}")
        if any(math.isnan(v) for v in self.eps):
            raise ValueError("epsilon bounds must not be NaN")


def epsilon_constraint(problem: Problem, bounds: EpsilonBounds, optimizer=None, seed: int = 0) -> Solution:
    if len(bounds.eps) != problem.M:
        raise DimensionMismatch(f"{len(bounds.eps)} bounds for {problem.M} objectives")
    l = bounds.keep - 1
    others = [i for i in range(problem.M) if i != l]
    eps = np.asarray([bounds.eps[i] for i in others])

    def within(F):
        return np.all(F[:, others] <= eps, axis=1)

    try:
        return _minimize_objective(problem, lambda F: F[:, l], within, optimizer, seed)
    except OptimizerFailure as exc:
        raise Infeasible(f"no point satisfies the epsilon bounds {bounds.eps}") from exc


def epsilon_sweep(problem: Problem, grid_size: int, optimizer=None, seed: int = 0, keep: int = 1) -> Front:
    """Epsilon-constraint runs with bounds spread between the anchor values."""
    anchors = objective_matrix(anchor_points(problem, optimizer, seed))
    lo, hi = anchors.min(axis=0), anchors.max(axis=0)
    others = [i for i in range(problem.M) if i != keep - 1]
    axes = [np.linspace(lo[i], hi[i], grid_size) for i in others]
    points = []
    for combo in itertools.product(*axes):
        eps = [math.inf] * problem.M
        for i, v in zip(others, combo):
            eps[i] = float(v)
        param = {"keep": keep, "eps": [None if math.isinf(v) else v for v in eps]}
        try:
            points.append(SweepPoint(param, epsilon_constraint(problem, EpsilonBounds(keep, tuple(eps)), optimizer, seed)))
        except OptimizerFailure as exc:
            points.append(SweepPoint(param, error=str(exc)))
    return collect_sweep("epsilon-constraint", points)


# --- NBI / NC ----------------------------------------------------------------


@dataclass
class NbiGeometry:
    anchors: list[Solution]
    utopia_line: np.ndarray
    base_points: np.ndarray
    base_weights: np.ndarray = field(default_factory=lambda: np.empty(0))


def nbi_geometry(problem: Problem, n_base_points: int, optimizer=None, seed: int = 0) -> NbiGeometry:
    if problem.M != 2:
        raise Unsupported("NBI/NC is only defined here for two objectives")
    if n_base_points < 2:
        raise ValueError("n_base_points must be at least 2")
    anchors = anchor_points(problem, optimizer, seed)
    A1, A2 = (np.asarray(a.f) for a in anchors)
    omega = np.linspace(1.0, 0.0, n_base_points)
    base = omega[:, None] * A1 + (1.0 - omega)[:, None] * A2
    return NbiGeometry(anchors, A1 - A2, base, omega)


def nbi_nc_front(problem: Problem, n_base_points: int, optimizer=None, seed: int = 0) -> Front:
    """Normal-constraint front: minimize f_2 on the far side of each base point's normal line.

    The feasible half-plane at base point ``p`` is ``(A1 - A2) . (F(x) - p) >= 0``,
    i.e. the side facing the ``f_2`` anchor is excluded, so each sub-problem
    lands where the normal line meets the front. Non-Pareto results are
    filtered out at the end.
    """
    geo = nbi_geometry(problem, n_base_points, optimizer, seed)
    U = geo.utopia_line
    points = []
    for j, (w, p) in enumerate(zip(geo.base_weights, geo.base_points)):
        param = {"base_index": j, "omega": [float(w), float(1 - w)]}

        def above(F, p=p):
            return (F - p) @ U >= 0

        try:
            sol = _minimize_objective(problem, lambda F: F[:, 1], above, optimizer, seed)
            points.append(SweepPoint(param, sol))
        except OptimizerFailure as exc:
            points.append(SweepPoint(param, error=str(exc)))
    return collect_sweep("nbi-nc", points)


# --- goal programming and lexicographic ---------------------------------------


def goal_deviation(F: np.ndarray, goals: Sequence[float]) -> np.ndarray:
    """Sum of one-sided overshoots ``max(0, f_i - goal_i)`` per row."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    return np.sum(np.maximum(0.0, F - np.asarray(goals, dtype=float)), axis=1)


def goal_attainment(problem: Problem, goals: Sequence[float], optimizer=None, seed: int = 0) -> Solution:
    goals = tuple(float(g) for g in goals)
    if len(goals) != problem.M:
        raise DimensionMismatch(f"{len(goals)} goals for {problem.M} objectives")
    if not all(math.isfinite(g) for g in goals):
        raise ValueError("goals must be finite")
    return _minimize_objective(problem, lambda F: goal_deviation(F, goals), None, optimizer, seed)


def _objective_ranges(problem: Problem, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo, hi = problem.bounds.as_arrays()
    X = lo + rng.random((4096, problem.n)) * (hi - lo)
    F = problem.objectives_batch(X)
    return np.ptp(F, axis=0)


def lexicographic(
    problem: Problem,
    order: Sequence[int],
    optimizer=None,
    slack: float | Sequence[float] | None = None,
    seed: int = 0,
) -> Solution:
    """Minimize objectives one at a time in ``order`` (1-based).

    Stage ``k`` keeps every earlier objective within ``slack`` of its stage
    optimum. ``slack=None`` uses ``1e-6`` times each objective's range over
    a random sample of the box.
    """
    order = [int(o) for o in order]
    if sorted(order) != list(range(1, problem.M + 1)):
        raise ValueError(f"order must be a permutation of 1..{problem.M}")
    if slack is None:
        slacks = 1e-6 * _objective_ranges(problem, seed)
    else:
        slacks = np.broadcast_to(np.asarray(slack, dtype=float), (problem.M,)).copy()
    if np.any(slacks < 0):
        raise ValueError("slack must be non-negative")

    fixed: list[tuple[int, float]] = []
    sol: Solution | None = None
    for stage, obj in enumerate(order):
        i = obj - 1
        idx = [j for j, _ in fixed]
        caps = np.asarray([b for _, b in fixed])

        def within(F, idx=idx, caps=caps):
            if not idx:
                return np.ones(F.shape[0], dtype=bool)
            return np.all(F[:, idx] <= caps, axis=1)

        starts = [sol.x] if sol is not None else []
        try:
            sol = _minimize_objective(problem, lambda F, i=i: F[:, i], within, optimizer, seed, starts)
        except OptimizerFailure as exc:
            raise Infeasible(f"lexicographic stage {stage + 1} (f_{obj}) has no feasible point") from exc
        fixed.append((i, sol.f[i] + slacks[i]))
    assert sol is not None
    return sol
