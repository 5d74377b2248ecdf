"""Generational driver for VEGA, MOGA, NSGA, NSGA-II, NPGA and PAES."""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from ..core import Problem, Solution, dominator_counts, nondominated_mask
from ..errors import NonFiniteObjective
from .archive import ParetoArchive, paes_step
from .encoding import EncodingKind, EncodingSpec, crossover, decode, mutate, random_genome, validate
from .fitness import (
    crowded_tournament,
    moga_fitness,
    niche_counts,
    npga_select,
    nsga_fitness,
    roulette,
    truncate_by_crowding,
    vega_assign_and_select,
)

log = logging.getLogger(__name__)


class Algorithm(Enum):
    VEGA = "vega"
    MOGA = "moga"
    NSGA = "nsga"
    NSGA2 = "nsga2"
    NPGA = "npga"
    PAES = "paes"


@dataclass
class EvolutionConfig:
    algorithm: Algorithm = Algorithm.NSGA2
    population_size: int = 100
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    sigma_share: float = 0.1
    tournament_comparison_size: int = 10
    archive_capacity: int = 100
    seed: int = 0
    max_evaluations: int | None = None

    def __post_init__(self) -> None:
        if isinstance(self.algorithm, str):
            name = self.algorithm.lower().replace("-", "").replace("_", "")
            self.algorithm = Algorithm({"nsgaii": "nsga2"}.get(name, name))
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        for name in ("population_size", "generations", "tournament_comparison_size", "archive_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.population_size < 2 and self.algorithm is not Algorithm.PAES:
            raise ValueError("population_size must be at least 2")
        if not self.sigma_share > 0:
            raise ValueError("sigma_share must be positive")


@dataclass(frozen=True)
class ListProblem:
    """Choose ``list_length`` items out of ``n_items``.

    ``evaluate_lists`` maps an ``(P, list_length)`` integer array of item
    indices to a ``(P, M)`` objective matrix. Binary genomes hand it the
    selected items in ascending order; permutation genomes in list order.
    """

    n_items: int
    list_length: int
    evaluate_lists: Callable[[np.ndarray], np.ndarray]
    n_objectives: int
    encoding: EncodingKind = EncodingKind.BINARY
    name: str = ""

    @property
    def M(self) -> int:
        return self.n_objectives

    @property
    def spec(self) -> EncodingSpec:
        if self.encoding is EncodingKind.BINARY:
            return EncodingSpec.binary(self.n_items, self.list_length)
        return EncodingSpec.permutation(self.n_items, self.list_length)


class _Context:
    """Uniform genome -> Solution evaluation for both problem flavours."""

    def __init__(self, problem: Problem | ListProblem):
        self.problem = problem
        if isinstance(problem, ListProblem):
            self.spec = problem.spec
        else:
            self.spec = EncodingSpec.real(problem.bounds)
        self.evaluations = 0

    def evaluate(self, genomes: list[np.ndarray]) -> list[Solution]:
        self.evaluations += len(genomes)
        p = self.problem
        if isinstance(p, ListProblem):
            if self.spec.kind is EncodingKind.BINARY:
                G = np.asarray(genomes)
                if G.shape[1:] != (self.spec.length,) or np.any(G.sum(axis=1) != self.spec.n_select):
                    for g in genomes:
                        validate(g, self.spec)
                idx = np.nonzero(G)[1].reshape(len(genomes), self.spec.n_select)
                xs = [tuple(row) for row in idx.tolist()]
            else:
                xs = [decode(g, self.spec) for g in genomes]
                idx = np.asarray(xs, dtype=int)
            F = np.atleast_2d(np.asarray(p.evaluate_lists(idx), dtype=float))
            feasible = np.ones(len(xs), dtype=bool)
        else:
            X = np.asarray(genomes, dtype=float)
            F = p.objectives_batch(X)
            feasible = p.feasible_batch(X)
            xs = [tuple(float(v) for v in row) for row in X]
        if not np.all(np.isfinite(F)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(F), axis=1))[0])
            raise NonFiniteObjective(f"non-finite objectives at x={xs[bad]}")
        return [Solution(x, tuple(map(float, f)), bool(ok)) for x, f, ok in zip(xs, F, feasible)]


def _rank_matrix(sols: list[Solution]) -> np.ndarray:
    """Objective matrix with infeasible rows pushed behind every feasible one."""
    F = np.array([s.f for s in sols], dtype=float)
    bad = np.array([not s.feasible for s in sols])
    if bad.any():
        good = F[~bad]
        worst = good.max(axis=0) if good.size else F.max(axis=0)
        F[bad] = worst + 1.0 + np.abs(worst)
    return F


def _variation(parents: list[np.ndarray], spec: EncodingSpec, cfg: EvolutionConfig, rng) -> list[np.ndarray]:
    children = []
    for k in range(0, len(parents), 2):
        a = parents[k]
        b = parents[k + 1] if k + 1 < len(parents) else parents[0]
        if rng.random() < cfg.crossover_rate:
            pair = [crossover(a, b, spec, rng), crossover(b, a, spec, rng)]
        else:
            pair = [a.copy(), b.copy()]
        for c in pair:
            children.append(mutate(c, spec, rng) if rng.random() < cfg.mutation_rate else c)
    return children[: len(parents)]


def _select_parents(F: np.ndarray, cfg: EvolutionConfig, rng) -> np.ndarray:
    P = cfg.population_size
    alg = cfg.algorithm
    if alg is Algorithm.VEGA:
        return vega_assign_and_select(F, P, rng)
    if alg is Algorithm.MOGA:
        shared = moga_fitness(F) / niche_counts(F, cfg.sigma_share)
        return roulette(shared, P, rng)
    if alg is Algorithm.NSGA:
        _, shared, _ = nsga_fitness(F, cfg.sigma_share)
        return roulette(shared, P, rng)
    if alg is Algorithm.NPGA:
        return npga_select(F, P, cfg.tournament_comparison_size, cfg.sigma_share, rng)
    if alg is Algorithm.NSGA2:
        return crowded_tournament(dominator_counts(F), niche_counts(F, cfg.sigma_share), P, rng)
    raise ValueError(alg)


def _replace(pop, pop_sols, kids, kid_sols, cfg: EvolutionConfig):
    """Next generation's (genomes, solutions)."""
    P = cfg.population_size
    alg = cfg.algorithm
    if alg in (Algorithm.MOGA, Algorithm.NSGA, Algorithm.NPGA):
        return kids, kid_sols
    genomes = pop + kids
    sols = pop_sols + kid_sols
    F = _rank_matrix(sols)
    if alg is Algorithm.VEGA:
        nd = np.flatnonzero(nondominated_mask(F))
        if nd.size > P:
            chosen = nd[truncate_by_crowding(F[nd], P, cfg.sigma_share)].tolist()
        else:
            rest = [i for i in range(len(pop), len(sols)) if i not in set(nd)]
            rest += [i for i in range(len(pop)) if i not in set(nd)]
            chosen = nd.tolist() + rest[: P - nd.size]
    else:  # NSGA-II: fill by dominator-count group, crowding breaks the boundary group
        counts = dominator_counts(F)
        chosen: list[int] = []
        for c in np.unique(counts):
            group = np.flatnonzero(counts == c).tolist()
            if len(chosen) + len(group) <= P:
                chosen += group
                continue
            idx = chosen + group
            keep = truncate_by_crowding(F[idx], P, cfg.sigma_share, fixed=len(chosen))
            chosen = [idx[i] for i in keep]
            break
    return [genomes[i] for i in chosen], [sols[i] for i in chosen]


def _history_row(gen: int, archive: ParetoArchive, evaluations: int, hv_ref) -> dict:
    from ..select import HypervolumeRef, Orientation, hypervolume_set

    F = archive.objectives()
    row = {"generation": gen, "archive_size": len(archive), "evaluations": evaluations}
    for i, v in enumerate(F.min(axis=0) if len(archive) else []):
        row[f"best_f{i + 1}"] = float(v)
    hv = math.nan
    if hv_ref is not None and len(archive) and F.shape[1] == 2:
        hv = hypervolume_set(F, HypervolumeRef(tuple(hv_ref), Orientation.STANDARD_NADIR))
    row["hypervolume"] = hv
    return row


def evolve(problem: Problem | ListProblem, config: EvolutionConfig, initial: Sequence[np.ndarray] = ()) -> ParetoArchive:
    """Run the configured MOEA and return its archive of non-dominated solutions.

    Every evaluated feasible individual is offered to the archive, so the
    result is the non-dominated subset of everything the run has seen,
    thinned by crowding when it exceeds ``archive_capacity``. The archive
    carries a per-generation ``history`` and a ``budget_exceeded`` flag.

    ``initial`` genomes replace the first random members of the starting
    population (PAES starts from ``initial[0]``).
    """
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    ctx = _Context(problem)
    spec = ctx.spec
    archive = ParetoArchive(cfg.archive_capacity, cfg.sigma_share)

    def over_budget(extra: int) -> bool:
        return cfg.max_evaluations is not None and ctx.evaluations + extra > cfg.max_evaluations

    if cfg.algorithm is Algorithm.PAES:
        genome = random_genome(spec, rng)
        if len(initial):
            genome = _checked(initial[0], spec)
        parent = ctx.evaluate([genome])[0]
        archive.add(parent, genome)
        hv_ref = _reference(np.array([parent.f]))

        def step_mutate(_sol, g, r):
            child = mutate(g, spec, r)
            return ctx.evaluate([child])[0], child

        archive.history.append(_history_row(0, archive, ctx.evaluations, hv_ref))
        for gen in range(1, cfg.generations + 1):
            if over_budget(cfg.population_size):
                archive.budget_exceeded = True
                break
            for _ in range(cfg.population_size):
                out = paes_step(parent, archive, step_mutate, rng, genome)
                parent, genome = out.parent, out.parent_genome
            archive.history.append(_history_row(gen, archive, ctx.evaluations, hv_ref))
    else:
        pop = [random_genome(spec, rng) for _ in range(cfg.population_size)]
        for k, g in enumerate(list(initial)[: cfg.population_size]):
            pop[k] = _checked(g, spec)
        sols = ctx.evaluate(pop)
        archive.update(sols, pop)
        hv_ref = _reference(_rank_matrix(sols))
        archive.history.append(_history_row(0, archive, ctx.evaluations, hv_ref))
        for gen in range(1, cfg.generations + 1):
            if over_budget(cfg.population_size):
                archive.budget_exceeded = True
                break
            parents_idx = _select_parents(_rank_matrix(sols), cfg, rng)
            kids = _variation([pop[i] for i in parents_idx], spec, cfg, rng)
            kid_sols = ctx.evaluate(kids)
            archive.update(kid_sols, kids)
            pop, sols = _replace(pop, sols, kids, kid_sols, cfg)
            archive.history.append(_history_row(gen, archive, ctx.evaluations, hv_ref))
    if archive.budget_exceeded:
        warnings.warn(f"evaluation budget {cfg.max_evaluations} reached; returning the archive so far", RuntimeWarning)
    return archive


def _checked(genome, spec: EncodingSpec) -> np.ndarray:
    g = np.array(genome)
    validate(g, spec)
    return g


def _reference(F: np.ndarray) -> np.ndarray | None:
    if F.shape[1] != 2:
        return None
    lo, hi = F.min(axis=0), F.max(axis=0)
    return hi + 0.1 * np.maximum(hi - lo, 1e-12)


def write_run_log(path, archive: ParetoArchive) -> None:
    """Per-generation CSV: ``generation,archive_size,best_f1..best_fM,hypervolume``."""
    rows = archive.history
    if not rows:
        return
    best = sorted((k for k in rows[0] if k.startswith("best_f")), key=lambda k: int(k[6:]))
    fields = ["generation", "archive_size", *best, "hypervolume"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([repr(r.get(k)) if isinstance(r.get(k), float) else r.get(k) for k in fields])
