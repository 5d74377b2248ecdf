"""Bounded archive of mutually non-dominated solutions, and the PAES step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from ..core import DominanceRelation, Front, Solution, compare_dominance, nondominated_mask, objective_matrix
from .fitness import niche_counts_of, truncate_by_crowding


class ParetoArchive:
    """Non-dominated solutions, at most ``capacity`` of them.

    Identical decision vectors are stored once. Equal objective vectors
    reached by different decisions are all kept. When full, the member with
    the largest niche count is evicted.
    """

    def __init__(self, capacity: int = 100, sigma_share: float = 0.1):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.sigma_share = sigma_share
        self.members: list[Solution] = []
        self.genomes: list = []
        self._F = np.empty((0, 0))
        self._xs: set = set()
        self.history: list[dict] = []
        self.budget_exceeded = False

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Solution]:
        return iter(self.members)

    def __getitem__(self, i: int) -> Solution:
        return self.members[i]

    def objectives(self) -> np.ndarray:
        if not self.members:
            return np.empty((0, 0))
        return self._F.copy()

    def to_front(self) -> Front:
        return Front(list(self.members), nondominated=True)

    def _set(self, members: list[Solution], gens: list) -> None:
        self.members, self.genomes = members, gens
        self._F = objective_matrix(members) if members else np.empty((0, 0))
        self._xs = {m.x for m in members}

    def _truncate(self) -> None:
        if len(self.members) > self.capacity:
            keep = truncate_by_crowding(self._F, self.capacity, self.sigma_share)
            self._set([self.members[i] for i in keep], [self.genomes[i] for i in keep])

    def update(self, solutions: Sequence[Solution], genomes: Sequence | None = None) -> None:
        """Merge a batch of candidates; infeasible ones are ignored."""
        genomes = list(genomes) if genomes is not None else [None] * len(solutions)
        if len(solutions) == 1:
            self._add_one(solutions[0], genomes[0])
            return
        seen = set(self._xs)
        members, gens = list(self.members), list(self.genomes)
        for s, g in zip(solutions, genomes):
            if s.feasible and s.x not in seen:
                seen.add(s.x)
                members.append(s)
                gens.append(g)
        if len(members) == len(self.members):
            return
        mask = nondominated_mask(objective_matrix(members))
        self._set([m for m, k in zip(members, mask) if k], [g for g, k in zip(gens, mask) if k])
        self._truncate()

    def _add_one(self, s: Solution, genome) -> None:
        if not s.feasible or s.x in self._xs:
            return
        if not self.members:
            self._set([s], [genome])
            return
        if self.dominates(s):
            return
        beaten = set(self.dominated_by(s))
        members = [m for i, m in enumerate(self.members) if i not in beaten] + [s]
        gens = [g for i, g in enumerate(self.genomes) if i not in beaten] + [genome]
        self._set(members, gens)
        self._truncate()

    def add(self, solution: Solution, genome=None) -> bool:
        """Insert one candidate; returns whether it is in the archive afterwards."""
        self._add_one(solution, genome)
        return solution.x in self._xs

    def dominated_by(self, solution: Solution) -> list[int]:
        """Indices of members that ``solution`` dominates."""
        if not self.members:
            return []
        f = np.asarray(solution.f, dtype=float)
        hit = np.all(f <= self._F, axis=1) & np.any(f < self._F, axis=1)
        return np.flatnonzero(hit).tolist()

    def dominates(self, solution: Solution) -> bool:
        """Whether some member dominates ``solution``."""
        if not self.members:
            return False
        f = np.asarray(solution.f, dtype=float)
        return bool(np.any(np.all(self._F <= f, axis=1) & np.any(self._F < f, axis=1)))


@dataclass
class PaesOutcome:
    parent: Solution
    parent_genome: object
    accepted: bool
    event: str


def paes_step(
    parent: Solution,
    archive: ParetoArchive,
    mutate: Callable[[Solution, object, np.random.Generator], tuple[Solution, object]],
    rng: np.random.Generator | int = 0,
    parent_genome=None,
) -> PaesOutcome:
    """One (1+1) local-search step; ``archive`` is updated in place.

    ``mutate(parent, parent_genome, rng)`` returns ``(child, child_genome)``.

    * child dominated by the parent (or by an archive member): discarded
    * child dominates the parent: it becomes the parent and enters the archive
    * otherwise: if the child dominates archive members it replaces them and
      becomes the parent; if not, it joins the archive when there is room and
      the less crowded of parent and child becomes the parent
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    child, child_genome = mutate(parent, parent_genome, rng)
    rel = compare_dominance(child.f, parent.f)
    if rel is DominanceRelation.DOMINATED_BY or not child.feasible:
        return PaesOutcome(parent, parent_genome, False, "discarded")
    if rel is DominanceRelation.DOMINATES:
        archive.add(child, child_genome)
        return PaesOutcome(child, child_genome, True, "replaced-parent")
    if archive.dominates(child):
        return PaesOutcome(parent, parent_genome, False, "discarded")
    if archive.dominated_by(child):
        archive.add(child, child_genome)
        return PaesOutcome(child, child_genome, True, "replaced-archive")

    kept = archive.add(child, child_genome)
    others = [m.f for m in archive.members if m.x not in (parent.x, child.x)]
    F = np.array(others + [parent.f, child.f], dtype=float)
    nc = niche_counts_of(F, [len(others), len(others) + 1], archive.sigma_share)
    if nc[1] < nc[0]:
        return PaesOutcome(child, child_genome, kept, "child-less-crowded")
    return PaesOutcome(parent, parent_genome, kept, "parent-kept")
