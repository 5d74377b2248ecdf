import json

import numpy as np
import pytest

from pareto_kit.bench import (
    BenchRow,
    checks,
    coverage_gap,
    grid_spacing,
    hv_reference,
    reference_front,
    report_dict,
)
from pareto_kit.core import Front, Solution
from pareto_kit.errors import ParseError
from pareto_kit.io import read_front, write_front, write_scores
from pareto_kit.problems import example2


def _front():
    return Front(
        [Solution((0.1, 2.0), (1.0 / 3.0, 5.0), True), Solution((0.7, -1.5), (2.0, 1e-17), False)],
        nondominated=False,
    )


def test_front_round_trip_is_exact(tmp_path):
    path = tmp_path / "f.csv"
    write_front(path, _front())
    assert path.read_text().splitlines()[0] == "id,x_1,x_2,f_1,f_2,feasible"
    back = read_front(path)
    assert [s.x for s in back] == [s.x for s in _front()]
    assert [s.f for s in back] == [s.f for s in _front()]
    assert [s.feasible for s in back] == [True, False]
    write_front(tmp_path / "g.csv", back)
    assert (tmp_path / "g.csv").read_bytes() == path.read_bytes()


def test_sweep_front_carries_method_and_params(tmp_path):
    front = Front(list(_front()), nondominated=False, meta=[{"method": "ws", "param": {"w": [0.5, 0.5]}}] * 2)
    write_front(tmp_path / "s.csv", front)
    head, first = (tmp_path / "s.csv").read_text().splitlines()[:2]
    assert head.startswith("method,param_json,id,")
    back = read_front(tmp_path / "s.csv")
    assert back.meta[0] == {"method": "ws", "param": {"w": [0.5, 0.5]}}


@pytest.mark.parametrize(
    "text",
    [
        "",
        "a,b,c\n1,2,3\n",
        "id,x_1,f_1,feasible\n0,1.0,2.0\n",
        "id,x_1,f_1,feasible\n0,1.0,abc,1\n",
        "id,x_1,f_1,feasible\n0,1.0,nan,1\n",
    ],
)
def test_read_front_rejects_bad_files(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError):
        read_front(path)


def test_write_scores(tmp_path):
    write_scores(tmp_path / "s.csv", [0.5, 0.25], 0, "phi")
    assert (tmp_path / "s.csv").read_text() == "id,phi,selected\n0,0.5,1\n1,0.25,0\n"


def test_reference_front_and_metrics():
    ref = reference_front(example2(), points=601)
    assert np.all(ref[:, 0] <= 5.0 + 1e-12) and ref[:, 0].min() == pytest.approx(-1.0)
    assert coverage_gap(ref, ref) == 0.0
    assert grid_spacing(ref) > 0
    # a single endpoint leaves most of the front uncovered
    assert coverage_gap(ref[:1], ref) > 0.5
    r = hv_reference(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert r == pytest.approx((1.1, 1.1))


def _row(method, gap, spacing=0.01):
    return BenchRow("example3", method, 10, gap, spacing, 1.0, 1.0, 0.0)


def test_bench_checks_logic():
    ok = checks([_row("weighted-sum", 0.5), _row("chebyshev", 0.1), _row("nsga2", 0.2)])
    assert [c.passed for c in ok] == [True, True, True]
    bad = checks([_row("weighted-sum", 0.02), _row("chebyshev", 0.015), _row("nsga2", 0.001)])
    assert [c.passed for c in bad] == [False, False, True]
    d = report_dict([_row("weighted-sum", 0.5)], ok)
    assert "seconds" not in d["rows"][0] and d["passed"]
    json.dumps(d)
