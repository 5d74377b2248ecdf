"""Genetic multi-objective evolutionary algorithms."""

from .archive import PaesOutcome, ParetoArchive, paes_step
from .encoding import EncodingKind, EncodingSpec, crossover, decode, mutate, random_genome, validate
from .evolve import Algorithm, EvolutionConfig, ListProblem, evolve, write_run_log
from .fitness import (
    fitness_sharing,
    moga_fitness,
    moga_ranks,
    niche_count,
    niche_counts,
    npga_tournament,
    nsga_fitness,
    truncate_by_crowding,
    vega_assign_and_select,
    vega_probabilities,
)

__all__ = [
    "Algorithm",
    "EncodingKind",
    "EncodingSpec",
    "EvolutionConfig",
    "ListProblem",
    "PaesOutcome",
    "ParetoArchive",
    "crossover",
    "decode",
    "evolve",
    "fitness_sharing",
    "moga_fitness",
    "moga_ranks",
    "mutate",
    "niche_count",
    "niche_counts",
    "npga_tournament",
    "nsga_fitness",
    "paes_step",
    "random_genome",
    "truncate_by_crowding",
    "validate",
    "vega_assign_and_select",
    "vega_probabilities",
    "write_run_log",
]
