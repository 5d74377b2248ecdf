"""Front-quality comparison of weighted sum, Chebyshev and NSGA-II.

Each method's front is measured against a dense-grid reference front:

* coverage gap: the largest distance from a reference point to the nearest
  method point, on objectives min-max normalized by the reference front;
  a missed stretch of the front shows up as a large gap
* grid spacing: the largest distance between consecutive reference points,
  i.e. the resolution floor for the coverage gap
* hypervolume against the reference front's nadir plus 10% of its range
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import Problem, nondominated_mask, objective_matrix
from .moea import EvolutionConfig, evolve
from .problems import get_problem
from .scalarize import IdealMode, ScalarizationKind, ScalarizationMethod, weight_sweep
from .select import HypervolumeRef, Orientation, hypervolume_set

log = logging.getLogger(__name__)

GRID_POINTS = 6001
SWEEP_SIZE = 101
# weighted sum has to leave a hole this many grid spacings wide
MISS_FACTOR = 3.0
# and the other methods have to shrink that hole by at least this factor
IMPROVEMENT_FACTOR = 2.0


def reference_front(problem: Problem, points: int = GRID_POINTS) -> np.ndarray:
    """Dense-grid Pareto front, sorted by f_1.

    ``example2`` is one-dimensional and gridded directly. For ``example3``
    the ``x_2^2`` term can only add to f_2, so the front lies on ``x_2 = 0``
    and a grid over ``x_1`` suffices.
    """
    lo, hi = problem.bounds.as_arrays()
    if problem.name == "example3":
        X = np.column_stack([np.linspace(lo[0], hi[0], points), np.zeros(points)])
    elif problem.n == 1:
        X = np.linspace(lo[0], hi[0], points)[:, None]
    else:
        raise ValueError(f"no dense-grid reference for {problem.name!r}")
    F = problem.objectives_batch(X)
    F = F[nondominated_mask(F)]
    return F[np.lexsort((F[:, 1], F[:, 0]))]


def _scale(ref: np.ndarray):
    lo, span = ref.min(axis=0), np.ptp(ref, axis=0)
    span = np.where(span > 0, span, 1.0)
    return lambda F: (np.asarray(F, dtype=float) - lo) / span


def grid_spacing(ref: np.ndarray) -> float:
    Z = _scale(ref)(ref)
    return float(np.max(np.linalg.norm(np.diff(Z, axis=0), axis=1)))


def coverage_gap(F: np.ndarray, ref: np.ndarray) -> float:
    """Largest distance from a reference point to its nearest point of ``F``."""
    scale = _scale(ref)
    d, _ = cKDTree(scale(F)).query(scale(ref))
    return float(d.max())


def hv_reference(ref: np.ndarray) -> tuple[float, ...]:
    lo, hi = ref.min(axis=0), ref.max(axis=0)
    return tuple(float(v) for v in hi + 0.1 * (hi - lo))


@dataclass
class BenchRow:
    problem: str
    method: str
    points: int
    coverage_gap: float
    grid_spacing: float
    hypervolume: float
    reference_hypervolume: float
    seconds: float


def method_fronts(problem: Problem, seed: int = 0, sweep_size: int = SWEEP_SIZE, pop: int = 100, gens: int = 100):
    """Yield ``(method, objective matrix, seconds)`` for the three methods."""
    w = (0.5,) * problem.M if problem.M == 2 else tuple([1.0 / problem.M] * problem.M)
    for name, kind in (("weighted-sum", ScalarizationKind.WEIGHTED_SUM), ("chebyshev", ScalarizationKind.CHEBYSHEV)):
        t = time.perf_counter()
        front = weight_sweep(problem, ScalarizationMethod(kind, w, ideal_mode=IdealMode.UTOPIA), sweep_size, seed=seed)
        yield name, front.objectives(), time.perf_counter() - t
    t = time.perf_counter()
    archive = evolve(problem, EvolutionConfig(population_size=pop, generations=gens, seed=seed))
    yield "nsga2", archive.objectives(), time.perf_counter() - t


def bench_problem(name: str, seed: int = 0, **kw) -> list[BenchRow]:
    problem = get_problem(name)
    ref = reference_front(problem)
    spacing = grid_spacing(ref)
    hv_ref = HypervolumeRef(hv_reference(ref), Orientation.STANDARD_NADIR)
    ref_hv = hypervolume_set(ref, hv_ref)
    rows = []
    for method, F, secs in method_fronts(problem, seed, **kw):
        rows.append(
            BenchRow(name, method, len(F), coverage_gap(F, ref), spacing, hypervolume_set(F, hv_ref), ref_hv, secs)
        )
        log.info("%s/%s: %d points, gap %.4g in %.2fs", name, method, len(F), rows[-1].coverage_gap, secs)
    return rows


@dataclass
class BenchCheck:
    name: str
    passed: bool
    detail: str


def checks(rows: list[BenchRow]) -> list[BenchCheck]:
    """Weighted sum misses part of the example3 front; the others close most of the hole."""
    by = {(r.problem, r.method): r for r in rows}
    out = []
    ws = by.get(("example3", "weighted-sum"))
    if ws is None:
        return out
    out.append(
        BenchCheck(
            "weighted-sum misses a front segment",
            ws.coverage_gap > MISS_FACTOR * ws.grid_spacing,
            f"gap {ws.coverage_gap:.4g} vs {MISS_FACTOR:g} x spacing {ws.grid_spacing:.4g}",
        )
    )
    for m in ("chebyshev", "nsga2"):
        r = by.get(("example3", m))
        if r is None:
            continue
        out.append(
            BenchCheck(
                f"{m} shrinks the gap",
                IMPROVEMENT_FACTOR * r.coverage_gap <= ws.coverage_gap,
                f"gap {r.coverage_gap:.4g} vs weighted-sum {ws.coverage_gap:.4g}",
            )
        )
    return out


def run_bench(seed: int = 0, problems=("example2", "example3"), **kw) -> tuple[list[BenchRow], list[BenchCheck]]:
    rows = [row for name in problems for row in bench_problem(name, seed, **kw)]
    return rows, checks(rows)


def report_dict(rows: list[BenchRow], results: list[BenchCheck], timings: bool = False) -> dict:
    table = []
    for r in rows:
        d = asdict(r)
        if not timings:
            d.pop("seconds")
        table.append(d)
    return {"rows": table, "checks": [asdict(c) for c in results], "passed": all(c.passed for c in results)}


def format_table(rows: list[BenchRow], results: list[BenchCheck]) -> str:
    head = f"{'problem':<10} {'method':<13} {'points':>6} {'gap':>10} {'spacing':>10} {'hv':>10} {'hv_ref':>10}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.problem:<10} {r.method:<13} {r.points:>6d} {r.coverage_gap:>10.4g} "
            f"{r.grid_spacing:>10.4g} {r.hypervolume:>10.5g} {r.reference_hypervolume:>10.5g}"
        )
    for c in results:
        lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    return "\n".join(lines)
