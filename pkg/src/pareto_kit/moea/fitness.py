"""Fitness assignment and parent-selection schemes for the genetic MOEAs.

Everything here works on an objective matrix ``F`` of shape ``(N, M)``
(one row per individual, all objectives minimized) and returns per-row
values or selected row indices. Ties are broken towards the lowest index.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ..core import dominator_counts, iterative_front_indices
from ..errors import InvalidNicheCount, PopulationTooSmall


def normalize_objectives(F: np.ndarray) -> np.ndarray:
    """Min-max scale each column to [0, 1]; constant columns become 0."""
    F = np.asarray(F, dtype=float)
    lo, span = F.min(axis=0), np.ptp(F, axis=0)
    return np.divide(F - lo, span, out=np.zeros_like(F), where=span > 0)


def sharing_matrix(F: np.ndarray, sigma_share: float, normalize: bool = True) -> np.ndarray:
    """Pairwise ``sh(d) = max(0, 1 - d / sigma_share)`` in objective space."""
    if not sigma_share > 0:
        raise ValueError("sigma_share must be positive")
    Z = normalize_objectives(F) if normalize else np.asarray(F, dtype=float)
    return np.maximum(0.0, 1.0 - cdist(Z, Z) / sigma_share)


def niche_counts(F: np.ndarray, sigma_share: float, normalize: bool = True) -> np.ndarray:
    """Niche count of every row; each individual counts itself once."""
    return sharing_matrix(F, sigma_share, normalize).sum(axis=1)


def niche_count(index: int, F: np.ndarray, sigma_share: float, normalize: bool = True) -> float:
    return float(niche_counts_of(F, [index], sigma_share, normalize)[0])


def niche_counts_of(F: np.ndarray, rows, sigma_share: float, normalize: bool = True) -> np.ndarray:
    """Niche counts of selected rows only, against the whole population."""
    if not sigma_share > 0:
        raise ValueError("sigma_share must be positive")
    Z = normalize_objectives(F) if normalize else np.asarray(F, dtype=float)
    return np.maximum(0.0, 1.0 - cdist(Z[list(rows)], Z) / sigma_share).sum(axis=1)


def fitness_sharing(fitness, niche_count):
    """Shared fitness ``z / nc``; works elementwise on arrays."""
    nc = np.asarray(niche_count, dtype=float)
    if np.any(nc < 1):
        raise InvalidNicheCount("niche count is at least 1 because an individual always counts itself")
    out = np.asarray(fitness, dtype=float) / nc
    return float(out) if out.ndim == 0 else out


# --- VEGA ----------------------------------------------------------------------


def vega_probabilities(z: Sequence[float]) -> np.ndarray:
    """Selection probabilities inside one VEGA sub-population.

    The raw rule ``1 - z / sum(z)`` sums to ``len(z) - 1``; dividing by that
    turns it into a distribution. A singleton gets probability 1. Fitness
    values that are not all positive are shifted so the smallest becomes 1
    before the rule is applied.
    """
    z = np.asarray(z, dtype=float)
    if z.size == 1:
        return np.ones(1)
    if np.any(z <= 0):
        z = z - z.min() + 1.0
    raw = 1.0 - z / z.sum()
    return raw / (z.size - 1)


def vega_assign_and_select(F: np.ndarray, n_parents: int, rng: np.random.Generator) -> np.ndarray:
    """Randomly split the population into one group per objective and sample
    parents from group ``i`` according to objective ``i``."""
    F = np.asarray(F, dtype=float)
    N, M = F.shape
    if N < M:
        raise PopulationTooSmall(f"VEGA needs at least {M} individuals for {M} objectives")
    groups = np.array_split(rng.permutation(N), M)
    quotas = [len(c) for c in np.array_split(np.arange(n_parents), M)]
    parents = []
    for i, (members, quota) in enumerate(zip(groups, quotas)):
        p = vega_probabilities(F[members, i])
        parents.append(rng.choice(members, quota, replace=True, p=p))
    return np.concatenate(parents)


# --- MOGA ----------------------------------------------------------------------


def moga_ranks(F: np.ndarray) -> np.ndarray:
    """``1 + number of individuals dominating each row``."""
    return 1 + dominator_counts(F)


def moga_fitness(F: np.ndarray) -> np.ndarray:
    """Rank-based fitness ``N - sum_{k<r} n_k - 0.5 (n_r - 1)``.

    ``n_k`` is how many individuals hold rank ``k``. With five individuals of
    ranks (1, 1, 2, 2, 4) this gives (4.5, 4.5, 2.5, 2.5, 1.0).
    """
    r = moga_ranks(F)
    N = r.size
    n = np.bincount(r, minlength=r.max() + 1)
    below = np.concatenate([[0], np.cumsum(n)])  # below[k] = sum of n_j for j < k
    return N - below[r] - 0.5 * (n[r] - 1)


# --- NSGA ----------------------------------------------------------------------


def nsga_fitness(F: np.ndarray, sigma_share: float) -> tuple[np.ndarray, np.ndarray, list[list[int]]]:
    """Dummy fitness per front (``n_fronts - i`` for front ``i``) and the
    shared fitness obtained by dividing by niche counts taken within each front.

    Returns ``(dummy, shared, fronts)``.
    """
    F = np.asarray(F, dtype=float)
    fronts = iterative_front_indices(F)
    dummy = np.empty(F.shape[0])
    shared = np.empty(F.shape[0])
    for i, idx in enumerate(fronts):
        dummy[idx] = len(fronts) - i
        shared[idx] = dummy[idx] / niche_counts(F[idx], sigma_share)
    return dummy, shared, fronts


# --- NPGA ----------------------------------------------------------------------


def _dominated_by_any(F: np.ndarray, i: int, group: np.ndarray) -> bool:
    G = F[group]
    return bool(np.any(np.all(G <= F[i], axis=1) & np.any(G < F[i], axis=1)))


def npga_tournament(
    F: np.ndarray,
    a: int,
    b: int,
    comparison_set: Sequence[int],
    sigma_share: float,
    niche: np.ndarray | None = None,
) -> int:
    """Pick the winner of candidates ``a`` and ``b`` against a comparison set.

    If exactly one candidate is dominated by some member of the set, the
    other wins. Otherwise the one with the smaller niche count wins, then
    the lower index.
    """
    if a == b:
        return a
    F = np.asarray(F, dtype=float)
    group = np.asarray(comparison_set, dtype=int)
    a_dom = _dominated_by_any(F, a, group)
    b_dom = _dominated_by_any(F, b, group)
    if a_dom != b_dom:
        return b if a_dom else a
    nc = niche if niche is not None else niche_counts(F, sigma_share)
    if nc[a] != nc[b]:
        return a if nc[a] < nc[b] else b
    return min(a, b)


def npga_select(
    F: np.ndarray, n_parents: int, comparison_size: int, sigma_share: float, rng: np.random.Generator
) -> np.ndarray:
    N = F.shape[0]
    nc = niche_counts(F, sigma_share)
    size = min(comparison_size, N)
    out = np.empty(n_parents, dtype=int)
    for k in range(n_parents):
        a, b = rng.integers(N, size=2)
        group = rng.choice(N, size, replace=False)
        out[k] = npga_tournament(F, int(a), int(b), group, sigma_share, nc)
    return out


# --- generic selection -----------------------------------------------------------


def roulette(fitness: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Fitness-proportional sampling with replacement."""
    f = np.asarray(fitness, dtype=float)
    if np.any(f < 0):
        f = f - f.min()
    total = f.sum()
    p = f / total if total > 0 else np.full(f.size, 1.0 / f.size)
    return rng.choice(f.size, n, replace=True, p=p)


def crowded_tournament(
    rank: np.ndarray, crowding: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Binary tournament: lower rank wins, then lower niche count, then lower index."""
    N = rank.size
    out = np.empty(n, dtype=int)
    for k in range(n):
        a, b = sorted(rng.integers(N, size=2).tolist())
        out[k] = min((a, b), key=lambda i: (rank[i], crowding[i]))
    return out


def truncate_by_crowding(F: np.ndarray, keep: int, sigma_share: float, fixed: int = 0) -> np.ndarray:
    """Indices of ``keep`` rows left after repeatedly dropping the most crowded.

    The first ``fixed`` rows are never dropped but still count towards the
    crowding of the others. Returns the surviving indices in input order.
    """
    N = F.shape[0]
    if keep >= N:
        return np.arange(N)
    S = sharing_matrix(F, sigma_share)
    alive = np.ones(N, dtype=bool)
    nc = S.sum(axis=1)
    for _ in range(N - keep):
        cand = np.where(alive, nc, -np.inf)
        cand[:fixed] = -np.inf
        worst = int(np.argmax(cand))
        alive[worst] = False
        nc -= S[:, worst]
    return np.flatnonzero(alive)
