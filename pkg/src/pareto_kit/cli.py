"""Command-line entry point: ``pareto-kit {solve,front,select,recsys,bench}``.

Workflow: with preference weights up front (A_PRIORI) solve one scalarized
problem; otherwise generate a front (A_POSTERIORI) and, when nobody is there
to choose (NO_DM), pick a solution automatically.

Settings come from ``--config file.json`` (keys = RunConfig field names)
with command-line flags taking precedence. The seed falls back to the
``PARETO_KIT_SEED`` environment variable, then 0.

Exit codes: 0 success, 1 acceptance check failed, 2 bad config or input,
3 optimizer failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path

import numpy as np

from . import io
from .core import Front
from .errors import ConfigError, OptimizerFailure, ParetoKitError
from .moea import Algorithm, EvolutionConfig, evolve, write_run_log
from .problems import BUILTIN_PROBLEMS, get_problem
from .scalarize import (
    EpsilonBounds,
    IdealMode,
    ScalarizationKind,
    ScalarizationMethod,
    epsilon_constraint,
    epsilon_sweep,
    goal_attainment,
    lexicographic,
    nbi_nc_front,
    solve_scalarized,
    weight_sweep,
)
from .select import SELECTORS, HypervolumeRef, McdmConfig, Orientation, Preference, hypervolume_set, select

log = logging.getLogger("pareto_kit")

EXIT_OK, EXIT_ACCEPTANCE, EXIT_CONFIG, EXIT_OPTIMIZER = 0, 1, 2, 3
SEED_ENV = "PARETO_KIT_SEED"


class Mode(Enum):
    A_PRIORI = "A_PRIORI"
    A_POSTERIORI = "A_POSTERIORI"
    NO_DM = "NO_DM"


SCALAR_METHODS = tuple(k.value for k in ScalarizationKind)
OTHER_METHODS = ("epsilon-constraint", "goal", "lexicographic")
GENERATORS = ("weight-sweep", "epsilon-schedule", "nbi-nc")
ALGORITHMS = tuple(a.value for a in Algorithm)


@dataclass
class RunConfig:
    problem: str = "example2"
    mode: str | None = None
    method: str = "weighted-sum"
    generator: str | None = None
    algorithm: str | None = None
    weights: list[float] | None = None
    p: float = 2.0
    ideal: str = "utopia"
    goal: list[float] | None = None
    eps: list[float | None] | None = None
    keep: int = 1
    order: list[int] | None = None
    slack: float | None = None
    grid: int = 11
    pop: int = 100
    gens: int = 100
    sigma_share: float = 0.1
    archive_capacity: int = 100
    selection_method: str | None = None
    preference: str = "linear"
    hv_reference: list[float] | None = None
    seed: int | None = None
    front: str | None = None
    ratings: str | None = None
    synthetic: list[int] | None = None
    like_threshold: float | None = None
    K: int = 50
    N: int = 10
    users: list[str] | None = None
    max_users: int | None = None
    out: str | None = None
    scores_out: str | None = None
    archive_dir: str | None = None
    run_log: str | None = None
    json: bool = False


FIELD_NAMES = {f.name for f in fields(RunConfig)}


# --- parsing helpers ---------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _eps(text: str) -> list[float | None]:
    out = []
    for v in text.split(","):
        v = v.strip().lower()
        out.append(None if v in ("", "inf", "none", "-") else float(v))
    return out


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _names(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pareto-kit", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file with RunConfig fields")
        p.add_argument("--seed", type=int)
        p.add_argument("--mode", help="A_PRIORI, A_POSTERIORI or NO_DM")
        p.add_argument("--out", help="output CSV path")

    def moea_flags(p):
        p.add_argument("--algorithm", help=f"one of {', '.join(ALGORITHMS)}")
        p.add_argument("--pop", type=int)
        p.add_argument("--gens", type=int)
        p.add_argument("--sigma-share", dest="sigma_share", type=float)
        p.add_argument("--archive-capacity", dest="archive_capacity", type=int)

    def weight_flags(p):
        p.add_argument("--method", help=f"one of {', '.join(SCALAR_METHODS + OTHER_METHODS)}")
        p.add_argument("--weights", type=_floats)
        p.add_argument("--p", type=float)
        p.add_argument("--ideal", help="utopia, goal or origin")
        p.add_argument("--goal", type=_floats)

    s = sub.add_parser("solve", help="solve one scalarized problem (A_PRIORI)")
    common(s)
    s.add_argument("--problem")
    weight_flags(s)
    s.add_argument("--eps", type=_eps, help="epsilon bounds, 'inf' for none")
    s.add_argument("--keep", type=int, help="objective kept by epsilon-constraint (1-based)")
    s.add_argument("--order", type=_ints, help="lexicographic order (1-based)")
    s.add_argument("--slack", type=float)

    f = sub.add_parser("front", help="generate a Pareto front (A_POSTERIORI / NO_DM)")
    common(f)
    f.add_argument("--problem")
    f.add_argument("--generator", help=f"one of {', '.join(GENERATORS)}")
    weight_flags(f)
    moea_flags(f)
    f.add_argument("--keep", type=int)
    f.add_argument("--grid", type=int)
    f.add_argument("--select", dest="selection_method", help=f"NO_DM selector: {', '.join(SELECTORS)}")
    f.add_argument("--scores-out", dest="scores_out")
    f.add_argument("--hv-reference", dest="hv_reference", type=_floats)
    f.add_argument("--run-log", dest="run_log")

    c = sub.add_parser("select", help="pick one solution from a front CSV")
    common(c)
    c.add_argument("front", nargs="?")
    c.add_argument("--method", dest="selection_method", help=f"one of {', '.join(SELECTORS)}")
    c.add_argument("--weights", type=_floats)
    c.add_argument("--preference", help="linear or usual (PROMETHEE)")
    c.add_argument("--hv-reference", dest="hv_reference", type=_floats)
    c.add_argument("--scores-out", dest="scores_out")

    r = sub.add_parser("recsys", help="CF top-K, multi-objective top-N re-ranking, automatic selection")
    common(r)
    r.add_argument("--ratings")
    r.add_argument("--synthetic", type=_ints, help="USERS,ITEMS")
    r.add_argument("--like-threshold", dest="like_threshold", type=float)
    r.add_argument("--K", type=int)
    r.add_argument("--N", type=int)
    moea_flags(r)
    r.add_argument("--select", dest="selection_method")
    r.add_argument("--weights", type=_floats)
    r.add_argument("--users", type=_names, help="comma-separated user ids (default: all)")
    r.add_argument("--max-users", dest="max_users", type=int)
    r.add_argument("--archive-dir", dest="archive_dir")

    b = sub.add_parser("bench", help="front-quality table: weighted sum vs Chebyshev vs NSGA-II")
    common(b)
    b.add_argument("--json", action="store_true", default=None)
    b.add_argument("--grid", type=int, help="sweep size (default 101)")
    b.add_argument("--pop", type=int)
    b.add_argument("--gens", type=int)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the JSON file, then explicit flags."""
    data: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(data) - FIELD_NAMES)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    for key, value in vars(args).items():
        if key in FIELD_NAMES and value is not None:
            data[key] = value
    cfg = RunConfig(**data)
    if cfg.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            cfg.seed = int(env) if env not in (None, "") else 0
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    return cfg


def _mode(cfg: RunConfig, default: Mode, allowed: tuple[Mode, ...], command: str) -> Mode:
    raw = (cfg.mode or default.value).upper().replace("-", "_")
    if raw == "INTERACTIVE":
        raise ConfigError("unsupported mode INTERACTIVE: interactive decision-maker sessions are not implemented")
    try:
        mode = Mode(raw)
    except ValueError:
        raise ConfigError(f"mode: unknown value {cfg.mode!r}; choose from {[m.value for m in Mode]}") from None
    if mode not in allowed:
        raise ConfigError(f"mode: {command} needs one of {[m.value for m in allowed]}, got {mode.value}")
    return mode


def _problem(cfg: RunConfig):
    if cfg.problem not in BUILTIN_PROBLEMS:
        raise ConfigError(f"problem: unknown {cfg.problem!r}; choose from {sorted(BUILTIN_PROBLEMS)}")
    return get_problem(cfg.problem)


def _scalar_method(cfg: RunConfig, M: int, need_weights: bool = True) -> ScalarizationMethod:
    try:
        kind = ScalarizationKind(cfg.method)
    except ValueError:
        raise ConfigError(f"method: unknown {cfg.method!r}; choose from {SCALAR_METHODS}") from None
    if cfg.weights is None:
        if need_weights:
            raise ConfigError("weights: A_PRIORI scalarization needs a weight vector (--weights)")
        weights = (1.0 / M,) * M
    else:
        weights = tuple(cfg.weights)
        if len(weights) != M:
            raise ConfigError(f"weights: {len(weights)} values for {M} objectives")
    try:
        ideal = IdealMode(cfg.ideal.lower())
    except ValueError:
        raise ConfigError(f"ideal: unknown {cfg.ideal!r}; choose from utopia, goal, origin") from None
    try:
        return ScalarizationMethod(kind, weights, cfg.p, ideal, tuple(cfg.goal) if cfg.goal else None)
    except ValueError as exc:
        raise ConfigError(f"weights/p/goal: {exc}") from None


def _fmt_vec(v) -> str:
    return "(" + ", ".join(repr(float(t)) for t in v) + ")"


def _echo(text: str) -> None:
    print(text, flush=True)


# --- commands ------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    _mode(cfg, Mode.A_PRIORI, (Mode.A_PRIORI,), "solve")
    problem = _problem(cfg)
    if cfg.method == "epsilon-constraint":
        if cfg.eps is None:
            raise ConfigError("eps: epsilon-constraint needs bounds (--eps)")
        eps = tuple(math.inf if v is None else float(v) for v in cfg.eps)
        try:
            bounds = EpsilonBounds(cfg.keep, eps)
        except ValueError as exc:
            raise ConfigError(f"eps/keep: {exc}") from None
        sol = epsilon_constraint(problem, bounds, seed=cfg.seed)
    elif cfg.method == "goal":
        if cfg.goal is None:
            raise ConfigError("goal: goal programming needs goals (--goal)")
        sol = goal_attainment(problem, cfg.goal, seed=cfg.seed)
    elif cfg.method == "lexicographic":
        if cfg.order is None:
            raise ConfigError("order: lexicographic needs an objective order (--order)")
        sol = lexicographic(problem, cfg.order, slack=cfg.slack, seed=cfg.seed)
    else:
        sol = solve_scalarized(problem, _scalar_method(cfg, problem.M), seed=cfg.seed)
    _echo(f"x={_fmt_vec(sol.x)} f={_fmt_vec(sol.f)}")
    if cfg.out:
        io.write_front(cfg.out, Front([sol], nondominated=True, meta=[{"method": cfg.method, "param": _params(cfg)}]))
    return EXIT_OK


def _params(cfg: RunConfig) -> dict:
    keys = {
        "epsilon-constraint": ("eps", "keep"),
        "goal": ("goal",),
        "lexicographic": ("order", "slack"),
    }.get(cfg.method, ("weights", "p", "ideal", "goal"))
    return {k: getattr(cfg, k) for k in keys}


def _front_hv_reference(F: np.ndarray, cfg: RunConfig) -> HypervolumeRef:
    if cfg.hv_reference is not None:
        return HypervolumeRef(tuple(cfg.hv_reference), Orientation.STANDARD_NADIR)
    lo, hi = F.min(axis=0), F.max(axis=0)
    return HypervolumeRef(tuple(float(v) for v in hi + 0.1 * (hi - lo)), Orientation.STANDARD_NADIR)


def _mcdm(cfg: RunConfig) -> McdmConfig:
    try:
        pref = Preference(cfg.preference.lower())
    except ValueError:
        raise ConfigError(f"preference: unknown {cfg.preference!r}; choose linear or usual") from None
    return McdmConfig(tuple(cfg.weights) if cfg.weights else None, pref)


def _selector(name: str | None) -> str:
    if name is None:
        raise ConfigError("selection_method: NO_DM needs a selection method (--select)")
    if name not in SELECTORS:
        raise ConfigError(f"selection_method: unknown {name!r}; choose from {SELECTORS}")
    return name


def _select_and_report(F: np.ndarray, method: str, cfg: RunConfig, ref: HypervolumeRef) -> None:
    idx, scores = select(F, method, _mcdm(cfg), ref)
    _echo(f"{method},{idx},{float(np.asarray(scores)[idx])!r}")
    if cfg.scores_out:
        io.write_scores(cfg.scores_out, scores, idx, header=f"{method}_score")


def _evolution_config(cfg: RunConfig, algorithm: str) -> EvolutionConfig:
    try:
        return EvolutionConfig(
            algorithm=algorithm,
            population_size=cfg.pop,
            generations=cfg.gens,
            sigma_share=cfg.sigma_share,
            archive_capacity=cfg.archive_capacity,
            seed=cfg.seed,
        )
    except ValueError as exc:
        raise ConfigError(f"algorithm/pop/gens: {exc}") from None


def cmd_front(cfg: RunConfig) -> int:
    mode = _mode(cfg, Mode.A_POSTERIORI, (Mode.A_POSTERIORI, Mode.NO_DM), "front")
    problem = _problem(cfg)
    if mode is Mode.NO_DM:
        _selector(cfg.selection_method)
    if cfg.generator and cfg.algorithm:
        raise ConfigError("generator/algorithm: give one of --generator or --algorithm, not both")
    generator = cfg.generator or (None if cfg.algorithm else "weight-sweep")
    if generator is not None and generator not in GENERATORS:
        raise ConfigError(f"generator: unknown {generator!r}; choose from {GENERATORS} or an --algorithm")
    if cfg.grid < 2:
        raise ConfigError("grid: needs at least 2 points")
    if generator == "weight-sweep":
        front = weight_sweep(problem, _scalar_method(cfg, problem.M, need_weights=False), cfg.grid, seed=cfg.seed)
    elif generator == "epsilon-schedule":
        front = epsilon_sweep(problem, cfg.grid, seed=cfg.seed, keep=cfg.keep)
    elif generator == "nbi-nc":
        front = nbi_nc_front(problem, cfg.grid, seed=cfg.seed)
    else:
        if cfg.algorithm.lower().replace("-", "") not in ALGORITHMS:
            raise ConfigError(f"algorithm: unknown {cfg.algorithm!r}; choose from {ALGORITHMS}")
        archive = evolve(problem, _evolution_config(cfg, cfg.algorithm))
        if cfg.run_log:
            write_run_log(cfg.run_log, archive)
        front = archive.to_front()
    out = cfg.out or "front.csv"
    io.write_front(out, front)
    F = front.objectives()
    hv = hypervolume_set(F, _front_hv_reference(F, cfg)) if F.shape[1] == 2 else math.nan
    _echo(f"front: {len(front)} solutions written to {out}; hypervolume {hv!r}")
    if mode is Mode.NO_DM:
        _select_and_report(F, cfg.selection_method, cfg, _front_hv_reference(F, cfg))
    return EXIT_OK


def cmd_select(cfg: RunConfig) -> int:
    _mode(cfg, Mode.NO_DM, (Mode.NO_DM, Mode.A_POSTERIORI), "select")
    if not cfg.front:
        raise ConfigError("front: a front CSV path is required")
    method = _selector(cfg.selection_method)
    try:
        front = io.read_front(cfg.front)
    except OSError as exc:
        raise ConfigError(f"front: {exc}") from None
    if not len(front):
        raise ConfigError("front: the CSV has no solutions")
    F = front.objectives()
    ref = HypervolumeRef(tuple(cfg.hv_reference)) if cfg.hv_reference else HypervolumeRef()
    if len(front) == 1:
        # every selector degenerates to the only candidate
        _echo(f"{method},0,{0.0!r}")
        if cfg.scores_out:
            io.write_scores(cfg.scores_out, [0.0], 0, header=f"{method}_score")
        return EXIT_OK
    _select_and_report(F, method, cfg, ref)
    return EXIT_OK


def cmd_recsys(cfg: RunConfig) -> int:
    from . import recsys

    _mode(cfg, Mode.NO_DM, (Mode.NO_DM,), "recsys")
    method = _selector(cfg.selection_method or "promethee")
    if cfg.K < 1 or cfg.N < 1:
        raise ConfigError("K/N: both must be at least 1")
    if cfg.N > cfg.K:
        raise ConfigError(f"N: InvalidN, N={cfg.N} exceeds K={cfg.K}")
    if cfg.ratings and cfg.synthetic:
        raise ConfigError("ratings/synthetic: give one data source")
    if cfg.ratings:
        try:
            matrix = recsys.load_ratings(cfg.ratings, cfg.like_threshold, cfg.seed)
        except OSError as exc:
            raise ConfigError(f"ratings: {exc}") from None
    elif cfg.synthetic:
        if len(cfg.synthetic) != 2:
            raise ConfigError("synthetic: expected USERS,ITEMS")
        matrix = recsys.synth_dataset(cfg.synthetic[0], cfg.synthetic[1], cfg.seed, like_threshold=cfg.like_threshold)
    else:
        raise ConfigError("ratings: give --ratings PATH or --synthetic USERS,ITEMS")
    sim = recsys.item_similarity(matrix)
    evo = _evolution_config(cfg, cfg.algorithm or "nsga2")
    users = list(cfg.users) if cfg.users else list(matrix.users)
    if cfg.max_users is not None:
        users = users[: cfg.max_users]
    mcdm = _mcdm(cfg)
    results, failed = [], 0
    for user in users:
        try:
            cand = recsys.cf_topk(matrix, sim, user, cfg.K)
            if len(cand) < cfg.N:
                raise recsys.InvalidN(f"only {len(cand)} candidates for N={cfg.N}")
            res = recsys.rerank(matrix, sim, user, cand, cfg.N, evo, method, mcdm)
        except (ParetoKitError, KeyError) as exc:
            failed += 1
            log.warning("user %s skipped: %s", user, exc)
            continue
        results.append(res)
        if cfg.archive_dir:
            Path(cfg.archive_dir).mkdir(parents=True, exist_ok=True)
            recsys.write_archive(Path(cfg.archive_dir) / f"archive_{user}.csv", matrix, res)
    out = cfg.out or "recommendations.csv"
    recsys.ensure_parent(out)
    recsys.write_recommendations(out, matrix, results)
    m = recsys.mean_metrics(matrix, results)
    _echo(
        f"users={len(results)} failed={failed} precision={m['precision']:.6f} "
        f"diversity={m['diversity']:.6f} novelty={m['novelty']:.6f}"
    )
    if not results:
        raise OptimizerFailure("no user could be re-ranked")
    return EXIT_OK


def cmd_bench(cfg: RunConfig, grid_given: bool) -> int:
    from . import bench

    kw = {"pop": cfg.pop, "gens": cfg.gens}
    if grid_given:
        kw["sweep_size"] = cfg.grid
    rows, results = bench.run_bench(seed=cfg.seed, **kw)
    if cfg.json:
        text = json.dumps(bench.report_dict(rows, results), indent=2, sort_keys=True)
    else:
        text = bench.format_table(rows, results)
    _echo(text)
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(text + "\n")
    return EXIT_OK if all(c.passed for c in results) else EXIT_ACCEPTANCE


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "front":
            return cmd_front(cfg)
        if args.command == "select":
            return cmd_select(cfg)
        if args.command == "recsys":
            return cmd_recsys(cfg)
        if args.command == "bench":
            return cmd_bench(cfg, args.grid is not None or cfg.grid != RunConfig.grid)
    except OptimizerFailure as exc:
        print(f"error: optimizer failure: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except (ParetoKitError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    parser.error(f"unknown command {args.command!r}")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
