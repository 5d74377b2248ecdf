import math

import numpy as np
import pytest

from oracles import example2_f, golden_section
from pareto_kit.core import Solution, nondominated_mask
from pareto_kit.errors import Infeasible, OptimizerFailure, OverflowGuard, Unsupported
from pareto_kit.optimize import GridSearch, PatternSearch, default_optimizer
from pareto_kit.core import BoxBounds
from pareto_kit.problems import example2, example3
from pareto_kit.scalarize import (
    EpsilonBounds,
    IdealMode,
    ScalarizationKind,
    ScalarizationMethod,
    SweepPoint,
    anchor_points,
    check_weights,
    collect_sweep,
    epsilon_constraint,
    epsilon_sweep,
    goal_attainment,
    goal_deviation,
    lexicographic,
    nbi_geometry,
    nbi_nc_front,
    scalar_objective,
    scalarize_values,
    simplex_weights,
    solve_scalarized,
    utopia_point,
    weight_sweep,
)

WS = ScalarizationKind.WEIGHTED_SUM
CHEB = ScalarizationKind.CHEBYSHEV


def test_weights_validation():
    assert check_weights((0.25, 0.75)) == (0.25, 0.75)
    for bad in [(0.0, 1.0), (0.6, 0.6), (-0.5, 1.5)]:
        with pytest.raises(ValueError):
            check_weights(bad)
    with pytest.raises(ValueError):
        ScalarizationMethod(ScalarizationKind.WEIGHTED_METRIC, (0.5, 0.5), p=0.5)
    with pytest.raises(ValueError):
        ScalarizationMethod(CHEB, (0.5, 0.5), ideal_mode=IdealMode.GOAL)


def test_scalar_objective_values():
    p = example2()
    assert scalar_objective(p, ScalarizationMethod(WS, (0.5, 0.5)))([2.5]) == pytest.approx(2.75)
    cheb = ScalarizationMethod(CHEB, (0.5, 0.5), ideal=(-1.0, 1.0))
    assert scalar_objective(p, cheb)([3.0]) == pytest.approx(3.0)


def test_formulas_on_a_fixed_vector():
    F = np.array([[2.0, 3.0]])
    w = (0.25, 0.75)
    assert scalarize_values(F, ScalarizationMethod(WS, w))[0] == pytest.approx(0.25 * 2 + 0.75 * 3)
    m = ScalarizationMethod(ScalarizationKind.WEIGHTED_EXP_SUM, w, p=2)
    assert scalarize_values(F, m)[0] == pytest.approx(0.25 * 4 + 0.75 * 9)
    # weights enter as w_i^p
    m = ScalarizationMethod(ScalarizationKind.WEIGHTED_METRIC, w, p=2, ideal_mode=IdealMode.ORIGIN)
    assert scalarize_values(F, m)[0] == pytest.approx(math.sqrt(0.25**2 * 4 + 0.75**2 * 9))
    m = ScalarizationMethod(CHEB, w, ideal_mode=IdealMode.GOAL, goal=(1.0, 1.0))
    assert scalarize_values(F, m)[0] == pytest.approx(max(0.25 * 1, 0.75 * 2))
    m = ScalarizationMethod(ScalarizationKind.EXP_WEIGHTED_CRITERION, w, p=2)
    expected = sum((math.exp(2 * wi) - 1) * math.exp(2 * fi) for wi, fi in zip(w, (2.0, 3.0)))
    assert scalarize_values(F, m)[0] == pytest.approx(expected)
    m = ScalarizationMethod(ScalarizationKind.WEIGHTED_PRODUCT, w)
    assert scalarize_values(F, m)[0] == pytest.approx(2**0.25 * 3**0.75)


def test_weighted_sum_continuous_in_weights():
    F = np.array([[1.0, 4.0]])
    vals = [scalarize_values(F, ScalarizationMethod(WS, (w, 1 - w)))[0] for w in np.linspace(0.01, 0.99, 50)]
    assert np.max(np.abs(np.diff(vals))) < 0.1


def test_overflow_guard():
    m = ScalarizationMethod(ScalarizationKind.EXP_WEIGHTED_CRITERION, (0.5, 0.5), p=2)
    with pytest.raises(OverflowGuard):
        scalarize_values(np.array([[1e4, 1.0]]), m)
    # weights summing to 1 keep the product below the largest factor
    m = ScalarizationMethod(ScalarizationKind.WEIGHTED_PRODUCT, (0.5, 0.5))
    assert np.isfinite(scalarize_values(np.array([[1e308, 1e308]]), m)[0])


def test_solve_weighted_sum_calculus_oracle():
    p = example2()
    s = solve_scalarized(p, ScalarizationMethod(WS, (0.5, 0.5)))
    assert s.x[0] == pytest.approx(2.5, abs=1e-6)
    assert s.f == pytest.approx((4.0, 1.5), abs=1e-5)
    s = solve_scalarized(p, ScalarizationMethod(WS, (1 / 3, 2 / 3)))
    assert s.x[0] == pytest.approx(2.75, abs=1e-6)


def test_solve_chebyshev_golden_section_oracle():
    w = (0.5, 0.5)

    def cheb(x):
        f1, f2 = example2_f(x)
        return max(w[0] * abs(f1 + 1), w[1] * abs(f2 - 1))

    x_star = golden_section(cheb, 0.0, 6.0)
    assert x_star == pytest.approx((7 - math.sqrt(13)) / 2, abs=1e-9)
    s = solve_scalarized(example2(), ScalarizationMethod(CHEB, w))
    assert s.x[0] == pytest.approx(x_star, abs=1e-6)


def test_utopia_and_anchors():
    p = example2()
    assert utopia_point(p) == pytest.approx((-1.0, 1.0), abs=1e-6)
    a1, a2 = anchor_points(p)
    assert a1.f == pytest.approx((-1.0, 19.0), abs=1e-5)
    assert a2.f == pytest.approx((5.0, 1.0), abs=1e-3)


def test_simplex_weights_are_strictly_positive():
    ws = simplex_weights(2, 11)
    assert len(ws) == 11
    for w in ws:
        assert min(w) >= 1e-3 - 1e-15 and math.fsum(w) == pytest.approx(1.0, abs=1e-12)
    assert len(simplex_weights(3, 4)) == 10


def test_weight_sweep_example2_in_pareto_set():
    front = weight_sweep(example2(), ScalarizationMethod(WS, (0.5, 0.5)), 11)
    assert 1 <= len(front) <= 11
    assert all(0 <= s.x[0] <= 3 + 1e-6 for s in front)
    assert np.all(nondominated_mask(front.objectives()))
    assert all("weights" in m["param"] for m in front.meta)


def test_collect_sweep_drops_weakly_dominated_and_records_failures():
    pts = [
        SweepPoint({"k": 0}, Solution((0.0,), (1.0, 2.0))),
        SweepPoint({"k": 1}, Solution((1.0,), (1.0, 3.0))),  # weakly dominated
        SweepPoint({"k": 2}, error="boom"),
        SweepPoint({"k": 3}, Solution((2.0,), (0.5, 4.0))),
    ]
    front = collect_sweep("chebyshev", pts)
    assert [s.x for s in front] == [(0.0,), (2.0,)]
    assert front.failures == [{"param": {"k": 2}, "error": "boom"}]
    with pytest.raises(OptimizerFailure):
        collect_sweep("x", [SweepPoint({}, error="e")])


def test_epsilon_constraint_cases():
    p = example2()
    s = epsilon_constraint(p, EpsilonBounds(1, (math.inf, 3.0)))
    assert s.x[0] == pytest.approx(2.0, abs=1e-3)
    assert s.f[0] == pytest.approx(3.0, abs=2e-3)
    with pytest.raises(Infeasible):
        epsilon_constraint(p, EpsilonBounds(1, (math.inf, 0.5)))
    s = epsilon_constraint(p, EpsilonBounds(2, (math.inf, math.inf)))
    assert s.x[0] == pytest.approx(3.0, abs=1e-6)


def test_epsilon_bounds_validation():
    with pytest.raises(ValueError):
        EpsilonBounds(0, (1.0, 1.0))
    with pytest.raises(ValueError):
        EpsilonBounds(1, (math.inf, math.nan))


def test_epsilon_with_margin_not_worse():
    p = example2()
    for x0 in (0.5, 1.5, 2.5):
        f = example2_f(x0)
        s = epsilon_constraint(p, EpsilonBounds(1, (math.inf, f[1] + 1e-3)))
        assert s.f[0] <= f[0] + 1e-6


def test_epsilon_sweep_in_pareto_set():
    front = epsilon_sweep(example2(), 6)
    assert all(0 <= s.x[0] <= 3 + 1e-3 for s in front)


def test_nbi_geometry_and_front():
    p = example2()
    geo = nbi_geometry(p, 5)
    assert geo.anchors[0].f == pytest.approx((-1, 19), abs=1e-5)
    assert geo.anchors[1].f == pytest.approx((5, 1), abs=1e-3)
    # base points lie on the anchor segment
    A1, A2 = (np.array(a.f) for a in geo.anchors)
    for w, b in zip(geo.base_weights, geo.base_points):
        assert b == pytest.approx(w * A1 + (1 - w) * A2)
    front = nbi_nc_front(p, 5)
    assert len(front) == 5
    xs = [s.x[0] for s in front]
    assert all(-1e-3 <= x <= 3 + 1e-3 for x in xs)
    f2 = [s.f[1] for s in front]
    assert all(a > b for a, b in zip(f2, f2[1:]))
    assert np.all(nondominated_mask(front.objectives()))


def test_nbi_rejects_three_objectives():
    from pareto_kit.core import Problem

    p = Problem((lambda x: x[0], lambda x: -x[0], lambda x: x[0] ** 2), BoxBounds((0.0,), (1.0,)))
    with pytest.raises(Unsupported):
        nbi_nc_front(p, 3)


def test_nbi_reaches_concave_region_of_example3():
    ws = weight_sweep(example3(), ScalarizationMethod(WS, (0.5, 0.5)), 101)
    nbi = nbi_nc_front(example3(), 11)
    ws_f1 = np.array([s.f[0] for s in ws])
    # some NBI point sits far from every weighted-sum point along f_1
    gaps = [np.min(np.abs(ws_f1 - s.f[0])) for s in nbi]
    assert max(gaps) > 0.05


def test_goal_programming():
    p = example2()
    s = goal_attainment(p, (5.0, 1.0))
    assert s.x[0] == pytest.approx(3.0, abs=1e-6)
    assert goal_deviation(np.array([s.f]), (5.0, 1.0))[0] == pytest.approx(0.0, abs=1e-9)
    x = np.linspace(0, 6, 2001)
    F = np.column_stack(example2_f(x))
    assert goal_deviation(F, (-10.0, 0.0)).min() >= 1.0
    f0 = example2_f(1.3)
    assert goal_deviation(np.array([f0]), f0)[0] == 0.0


def test_lexicographic_orders():
    p = example2()
    s = lexicographic(p, (2, 1), slack=0.0)
    assert s.x[0] == pytest.approx(3.0, abs=1e-5)
    s = lexicographic(p, (1, 2), slack=0.0)
    assert s.x[0] == pytest.approx(0.0, abs=1e-6)
    s = lexicographic(p, (2, 1), slack=1.0)
    assert s.x[0] == pytest.approx(3 - math.sqrt(0.5), abs=1e-3)
    assert s.f[1] == pytest.approx(2.0, abs=1e-3)
    with pytest.raises(ValueError):
        lexicographic(p, (1, 1))


@pytest.mark.parametrize(
    "kind", [ScalarizationKind.WEIGHTED_SUM, ScalarizationKind.WEIGHTED_EXP_SUM, ScalarizationKind.WEIGHTED_METRIC]
)
def test_scalarized_results_are_grid_nondominated(kind):
    x = np.linspace(0, 6, 2001)
    G = np.column_stack(example2_f(x))
    rng = np.random.default_rng(5)
    for _ in range(5):
        w1 = float(rng.uniform(0.05, 0.95))
        m = ScalarizationMethod(kind, (w1, 1 - w1), p=2)
        s = solve_scalarized(example2(), m)
        f = np.array(s.f)
        dominated = np.all(G <= f - 1e-6, axis=1) & np.any(G < f - 1e-6, axis=1)
        assert not dominated.any()


def test_optimizers_are_deterministic_and_respect_bounds():
    b = BoxBounds((-1.0,) * 4, (1.0,) * 4)

    def fun(X):
        return np.sum((X - 0.3) ** 2, axis=1)

    ps = PatternSearch()
    a, c = ps.minimize(fun, b, seed=3), ps.minimize(fun, b, seed=3)
    assert np.array_equal(a, c)
    assert np.all(np.abs(a) <= 1) and np.allclose(a, 0.3, atol=1e-4)
    assert isinstance(default_optimizer(2), GridSearch)
    assert isinstance(default_optimizer(4), PatternSearch)
    with pytest.raises(OptimizerFailure):
        GridSearch().minimize(fun, b, feasible=lambda X: np.zeros(len(X), dtype=bool))
