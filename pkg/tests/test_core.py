import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_dominates, brute_pareto_indices
from pareto_kit.core import (
    BoxBounds,
    ConstraintSet,
    DominanceRelation,
    Problem,
    compare_dominance,
    dominator_count_partition,
    dominator_counts,
    evaluate,
    nondominated_mask,
    nondominated_sort_iterative,
    pareto_filter,
    utopia_and_nadir,
)
from pareto_kit.errors import DimensionMismatch, EmptyInput, NonFiniteObjective
from pareto_kit.problems import example2, example3, get_problem

# five-point configuration: A, B non-dominated; C dominated by A; D dominated by B;
# E dominated by A, B and C
FIVE = {"A": (1.0, 5.0), "B": (5.0, 1.0), "C": (2.0, 6.0), "D": (7.0, 1.5), "E": (5.5, 7.0)}


def _names(front):
    inv = {v: k for k, v in FIVE.items()}
    return {inv[tuple(p)] for p in front}


def test_evaluate_example2_points():
    p = example2()
    s = evaluate(p, [3.0])
    assert s.f == (5.0, 1.0) and s.feasible
    s = evaluate(p, [0.0])
    assert s.f == (-1.0, 19.0) and s.feasible
    assert not evaluate(p, [7.0]).feasible


def test_evaluate_checks_dimension_and_finiteness():
    with pytest.raises(DimensionMismatch):
        evaluate(example2(), [1.0, 2.0])
    bad = Problem((lambda x: x[0], lambda x: math.nan), BoxBounds((0.0,), (1.0,)))
    with pytest.raises(NonFiniteObjective):
        evaluate(bad, [0.5])


def test_constraints_make_points_infeasible():
    cons = ConstraintSet(inequalities=(lambda x: x[0] - 0.5,), equalities=(lambda x: 0.0,))
    p = Problem((lambda x: x[0], lambda x: -x[0]), BoxBounds((0.0,), (1.0,)), cons)
    assert not evaluate(p, [0.2]).feasible
    assert evaluate(p, [0.7]).feasible
    eq = ConstraintSet(equalities=(lambda x: x[0] - 0.5,))
    q = Problem((lambda x: x[0], lambda x: -x[0]), BoxBounds((0.0,), (1.0,)), eq)
    assert evaluate(q, [0.5]).feasible
    assert not evaluate(q, [0.5 + 1e-6]).feasible


def test_box_bounds_validation():
    with pytest.raises(ValueError):
        BoxBounds((1.0,), (0.0,))


@pytest.mark.parametrize(
    "a,b,rel",
    [
        ((1, 1), (2, 2), DominanceRelation.DOMINATES),
        ((2, 2), (1, 1), DominanceRelation.DOMINATED_BY),
        ((1, 2), (2, 1), DominanceRelation.INCOMPARABLE),
        ((1, 1), (1, 1), DominanceRelation.EQUAL),
        ((1, 2), (1, 3), DominanceRelation.DOMINATES),
    ],
)
def test_compare_dominance_cases(a, b, rel):
    assert compare_dominance(a, b) is rel


def test_compare_dominance_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compare_dominance((1, 2), (1, 2, 3))


vec = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


@settings(max_examples=300, deadline=None)
@given(vec, vec, vec)
def test_dominance_algebra(a, b, c):
    assert compare_dominance(a, a) is DominanceRelation.EQUAL
    r = compare_dominance(a, b)
    if r is DominanceRelation.DOMINATES:
        assert compare_dominance(b, a) is DominanceRelation.DOMINATED_BY
    if r is DominanceRelation.DOMINATES and compare_dominance(b, c) is DominanceRelation.DOMINATES:
        assert compare_dominance(a, c) is DominanceRelation.DOMINATES
    assert (r is DominanceRelation.DOMINATES) == brute_dominates(a, b)


def test_pareto_filter_examples():
    assert [tuple(p) for p in pareto_filter([(1, 1), (2, 2), (0, 3)])] == [(1, 1), (0, 3)]
    assert [tuple(p) for p in pareto_filter([(0, 0)])] == [(0, 0)]
    fig4 = [(1, 3), (3, 1), (4, 4), (5, 3.5)]
    assert [tuple(p) for p in pareto_filter(fig4)] == [(1, 3), (3, 1)]


def test_pareto_filter_keeps_equal_vectors_and_rejects_empty():
    assert len(pareto_filter([(1, 1), (1, 1), (2, 2)])) == 2
    with pytest.raises(EmptyInput):
        pareto_filter([])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=40))
def test_pareto_filter_matches_oracle_and_is_idempotent(points):
    F = np.array(points, dtype=float)
    assert np.flatnonzero(nondominated_mask(F)).tolist() == brute_pareto_indices(points)
    once = pareto_filter(points)
    assert [tuple(p) for p in pareto_filter(once)] == [tuple(p) for p in once]


def test_iterative_sort_five_points():
    fronts = nondominated_sort_iterative(list(FIVE.values()))
    assert [_names(f) for f in fronts] == [{"A", "B"}, {"C", "D"}, {"E"}]


def test_iterative_sort_chain_and_incomparable():
    assert [len(f) for f in nondominated_sort_iterative([(1, 1), (2, 2), (3, 3)])] == [1, 1, 1]
    assert len(nondominated_sort_iterative([(0, 3), (1, 2), (2, 1), (3, 0)])) == 1


def test_iterative_sort_layers_are_supported():
    rng = np.random.default_rng(1)
    pts = [tuple(r) for r in rng.integers(0, 10, size=(80, 2)).astype(float)]
    fronts = nondominated_sort_iterative(pts)
    assert sorted(p for f in fronts for p in f) == sorted(pts)
    for prev, cur in zip(fronts, fronts[1:]):
        for p in cur:
            assert any(brute_dominates(q, p) for q in prev)


def test_dominator_count_partition_keeps_empty_group():
    groups = dominator_count_partition(list(FIVE.values()))
    assert [_names(g) for g in groups] == [{"A", "B"}, {"C", "D"}, set(), {"E"}]
    assert dominator_count_partition([(1, 2)]) == [[(1, 2)]]
    assert dominator_counts(np.array([[1, 1], [2, 2], [3, 3]])).tolist() == [0, 1, 2]


def test_utopia_and_nadir():
    assert utopia_and_nadir([(0, 1), (1, 0)]) == ((0, 0), (1, 1))
    assert utopia_and_nadir([(2, 3)]) == ((2, 3), (2, 3))
    x = np.linspace(0, 6, 6001)
    F = np.column_stack([2 * (x - 1) + 1, 2 * (x - 3) ** 2 + 1])
    front = F[nondominated_mask(F)]
    assert utopia_and_nadir(front)[0] == (-1.0, 1.0)


def test_example2_grid_pareto_set_is_zero_to_three():
    x = np.linspace(0, 6, 6001)
    F = example2().objectives_batch(x[:, None])
    mask = nondominated_mask(F)
    assert np.all(mask[x <= 3]) and not np.any(mask[x > 3])


def test_example3_and_registry():
    p = example3()
    s = evaluate(p, [0.5, 0.0])
    assert s.f[0] == 0.5
    assert s.f[1] == pytest.approx(1 - 0.5 - 0.1 * math.sin(1.5 * math.pi))
    assert get_problem("example2").name == "example2"
    with pytest.raises(KeyError):
        get_problem("nope")
