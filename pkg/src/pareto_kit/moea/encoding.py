"""Genome encodings and their variation operators.

* binary: one bit per catalog item, exactly ``n_select`` bits set
* permutation: an ordered list of ``length`` distinct item indices
* real: one float per decision variable, kept inside the box
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..core import BoxBounds
from ..errors import InvalidGenome


class EncodingKind(Enum):
    BINARY = "binary"
    PERMUTATION = "permutation"
    REAL = "real"


@dataclass(frozen=True)
class EncodingSpec:
    kind: EncodingKind
    length: int
    n_items: int | None = None
    n_select: int | None = None
    bounds: BoxBounds | None = None
    # Gaussian mutation scale as a fraction of each variable's range
    sigma_frac: float = 0.05
    blend_alpha: float = 0.5

    @classmethod
    def binary(cls, n_items: int, n_select: int) -> "EncodingSpec":
        if not 1 <= n_select <= n_items:
            raise ValueError("need 1 <= n_select <= n_items")
        return cls(EncodingKind.BINARY, n_items, n_items=n_items, n_select=n_select)

    @classmethod
    def permutation(cls, n_items: int, length: int) -> "EncodingSpec":
        if not 1 <= length <= n_items:
            raise ValueError("need 1 <= length <= n_items")
        return cls(EncodingKind.PERMUTATION, length, n_items=n_items)

    @classmethod
    def real(cls, bounds: BoxBounds) -> "EncodingSpec":
        return cls(EncodingKind.REAL, bounds.n, bounds=bounds)


def validate(genome: np.ndarray, spec: EncodingSpec) -> None:
    g = np.asarray(genome)
    if g.shape != (spec.length,):
        raise InvalidGenome(f"genome length {g.size}, expected {spec.length}")
    if spec.kind is EncodingKind.BINARY:
        if not np.all((g == 0) | (g == 1)):
            raise InvalidGenome("binary genome must contain only 0/1")
        if int(g.sum()) != spec.n_select:
            raise InvalidGenome(f"binary genome has {int(g.sum())} bits set, expected {spec.n_select}")
    elif spec.kind is EncodingKind.PERMUTATION:
        if len(set(g.tolist())) != g.size:
            raise InvalidGenome("permutation genome repeats an item")
        if g.min() < 0 or g.max() >= spec.n_items:
            raise InvalidGenome("permutation genome references an item outside the catalog")
    else:
        lo, hi = spec.bounds.as_arrays()
        if not np.all(np.isfinite(g)) or np.any(g < lo) or np.any(g > hi):
            raise InvalidGenome("real genome outside its bounds")


def decode(genome: np.ndarray, spec: EncodingSpec) -> tuple:
    """Binary -> selected item indices (0-based); permutation -> the item list; real -> the vector."""
    validate(genome, spec)
    g = np.asarray(genome)
    if spec.kind is EncodingKind.BINARY:
        return tuple(int(i) for i in np.flatnonzero(g))
    if spec.kind is EncodingKind.PERMUTATION:
        return tuple(int(i) for i in g)
    return tuple(float(v) for v in g)


def random_genome(spec: EncodingSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.kind is EncodingKind.BINARY:
        g = np.zeros(spec.length, dtype=np.int8)
        g[rng.choice(spec.length, spec.n_select, replace=False)] = 1
        return g
    if spec.kind is EncodingKind.PERMUTATION:
        return rng.choice(spec.n_items, spec.length, replace=False).astype(np.int64)
    lo, hi = spec.bounds.as_arrays()
    return lo + rng.random(spec.length) * (hi - lo)


def crossover(a: np.ndarray, b: np.ndarray, spec: EncodingSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.kind is EncodingKind.BINARY:
        # items both parents agree on are inherited; the rest are drawn from the symmetric difference
        common = np.flatnonzero((a == 1) & (b == 1))
        either = np.flatnonzero((a == 1) ^ (b == 1))
        need = spec.n_select - common.size
        child = np.zeros_like(a)
        child[common] = 1
        if need:
            child[either[np.argsort(rng.random(either.size), kind="stable")[:need]]] = 1
        return child
    if spec.kind is EncodingKind.PERMUTATION:
        # order crossover: keep a slice of ``a`` in place, fill the rest in ``b``'s order
        n = spec.length
        i, j = sorted(rng.choice(n + 1, 2, replace=False))
        child = np.full(n, -1, dtype=np.int64)
        child[i:j] = a[i:j]
        taken = set(a[i:j].tolist())
        fill = [v for v in b.tolist() if v not in taken]
        slots = [k for k in range(n) if not i <= k < j]
        child[slots] = fill[: len(slots)]
        return child
    lo, hi = spec.bounds.as_arrays()
    d = np.abs(a - b)
    low = np.minimum(a, b) - spec.blend_alpha * d
    high = np.maximum(a, b) + spec.blend_alpha * d
    return np.clip(low + rng.random(a.size) * (high - low), lo, hi)


def _n_moves(length: int, rng: np.random.Generator) -> int:
    """One move, plus each further move with probability 1/2, so any genome is reachable."""
    n = 1
    while n < length and rng.random() < 0.5:
        n += 1
    return n


def mutate(genome: np.ndarray, spec: EncodingSpec, rng: np.random.Generator) -> np.ndarray:
    g = genome.copy()
    if spec.kind is EncodingKind.BINARY:
        for _ in range(_n_moves(g.size, rng)):
            ones, zeros = np.flatnonzero(g == 1), np.flatnonzero(g == 0)
            if not zeros.size:
                break
            g[ones[rng.integers(ones.size)]], g[zeros[rng.integers(zeros.size)]] = 0, 1
        return g
    if spec.kind is EncodingKind.PERMUTATION:
        for _ in range(_n_moves(g.size, rng)):
            outside = np.setdiff1d(np.arange(spec.n_items), g)
            if outside.size and (g.size < 2 or rng.random() < 0.5):
                g[rng.integers(g.size)] = rng.choice(outside)
            elif g.size >= 2:
                i, j = rng.choice(g.size, 2, replace=False)
                g[i], g[j] = g[j], g[i]
        return g
    lo, hi = spec.bounds.as_arrays()
    pick = rng.random(g.size) < 1.0 / g.size
    if not pick.any():
        pick[rng.integers(g.size)] = True
    g[pick] += rng.normal(0.0, spec.sigma_frac * (hi - lo)[pick])
    return np.clip(g, lo, hi)
