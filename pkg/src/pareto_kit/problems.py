"""Built-in benchmark problems."""

from __future__ import annotations

import numpy as np

from .core import BoxBounds, Problem


def _ex2_f1(x):
    return 2.0 * (x[0] - 1.0) + 1.0


def _ex2_f2(x):
    return 2.0 * (x[0] - 3.0) ** 2 + 1.0


def _ex3_f1(x):
    return x[0] * 1.0


def _ex3_f2(x):
    return 1.0 + x[1] ** 2 - x[0] - 0.1 * np.sin(3.0 * np.pi * x[0])


def example2() -> Problem:
    """Linear vs. quadratic objective on [0, 6]; Pareto set is [0, 3]."""
    return Problem((_ex2_f1, _ex2_f2), BoxBounds((0.0,), (6.0,)), name="example2", vectorized=True)


def example3() -> Problem:
    """Non-convex front: ``f2 = 1 + x2^2 - x1 - 0.1 sin(3 pi x1)``."""
    return Problem(
        (_ex3_f1, _ex3_f2),
        BoxBounds((0.0, -2.0), (1.0, 2.0)),
        name="example3",
        vectorized=True,
    )


BUILTIN_PROBLEMS = {"example2": example2, "example3": example3}


def get_problem(name: str) -> Problem:
    try:
        return BUILTIN_PROBLEMS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(BUILTIN_PROBLEMS)}") from None
